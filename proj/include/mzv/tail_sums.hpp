#pragma once

#include "mzv/series.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mzv {

// ---------------------------------------------------------------------------
// Exact finite identities
// ---------------------------------------------------------------------------

/// (1-x) F_n(A,B;x) minus its summation-by-parts closed form, exactly.
/// Zero for every input; A and B need not be the limits of the sequences.
inline Rational abel_residual(const std::vector<Rational>& a, const std::vector<Rational>& b, const Rational& x,
                              const Rational& A, const Rational& B)
{
    if (a.size() != b.size()) throw std::invalid_argument("abel_residual: length mismatch");
    const std::size_t n = a.size();
    Rational lhs = 0, An = 0, Bn = 0, xk = 1;
    Rational sax = 0, sbx = 0;          // running sum_{i<=k} a_i x^i, b_i x^i
    Rational cross_a = 0, cross_b = 0;  // sum_k (sum_{i<=k} a_i x^i) b_k, and the mirror
    Rational diag = 0;                  // sum_k a_k b_k x^k
    for (std::size_t k = 0; k < n; ++k) {
        xk *= x;
        An += a[k];
        Bn += b[k];
        lhs += (A - An) * (B - Bn) * xk;
        sax += a[k] * xk;
        sbx += b[k] * xk;
        cross_a += sax * b[k];
        cross_b += sbx * a[k];
        diag += a[k] * b[k] * xk;
    }
    lhs *= (1 - x);
    Rational rhs = A * B * x - (A - An) * (B - Bn) * xk * x - sax * (B - Bn) - sbx * (A - An) - cross_a - cross_b + diag;
    return lhs - rhs;
}

/// sum A_k b_k + sum B_k a_k - sum a_k b_k - A_n B_n, exactly (always zero).
inline Rational finite_symmetry_residual(const std::vector<Rational>& a, const std::vector<Rational>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("finite_symmetry_residual: length mismatch");
    Rational An = 0, Bn = 0, s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        An += a[k];
        Bn += b[k];
        s += An * b[k] + Bn * a[k] - a[k] * b[k];
    }
    return s - An * Bn;
}

/// Integral of x^m ln^q x over (0,1) from I(m,q) = -q/(m+1) I(m,q-1).
inline Rational log_moment(std::uint64_t m, unsigned q)
{
    Rational v(1, static_cast<long>(m + 1));
    for (unsigned i = 1; i <= q; ++i) v *= Rational(-static_cast<long>(i), static_cast<long>(m + 1));
    return v;
}

/// Term-by-term integration of x^k ln^{r-1}x / (1-x) (weight 1) or
/// x^k ln^{r-1}x / (1-x)^2 (weight j+1): the exact partial sum over j < J and
/// a bound on the omitted terms.
struct IntegratedSeries {
    Rational partial;
    Float omitted_bound;
};

inline IntegratedSeries integrated_log_series(int r, std::uint64_t k, std::uint64_t J, bool squared_denominator)
{
    if (r < 2 || (squared_denominator && r < 3)) throw std::invalid_argument("integrated_log_series: r too small");
    Rational s = 0;
    for (std::uint64_t j = 0; j < J; ++j) {
        Rational w = squared_denominator ? Rational(static_cast<long>(j + 1)) : Rational(1);
        s += w * log_moment(k + j, static_cast<unsigned>(r - 1));
    }
    // |I(m, r-1)| = (r-1)!/(m+1)^r; the omitted weights are sums over m > k+J-1
    Float fact = to_float(factorial_q(static_cast<unsigned>(r - 1)));
    Float x = Float(k + J);
    Float bound = squared_denominator ? fact * (pow(x, 2 - r) / (r - 2) + Float(J) * pow(x, 1 - r) / (r - 1))
                                      : fact * pow(x, 1 - r) / (r - 1);
    return {s, bound};
}

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

/// A summable sequence a_k (k >= 1) with partial sums A_n and limit A.
struct SequenceSpec {
    enum class Kind { Power, AltPower, GeometricPower, FiniteList };
    Kind kind = Kind::Power;
    int s = 2;
    Rational x = 1;
    std::vector<Rational> list;

    static SequenceSpec power(int s) { return {Kind::Power, s, 1, {}}; }
    static SequenceSpec alt_power(int s) { return {Kind::AltPower, s, -1, {}}; }
    static SequenceSpec geometric_power(int s, Rational x)
    {
        if (x == 1) return power(s);
        if (x == -1) return alt_power(s);
        return {Kind::GeometricPower, s, std::move(x), {}};
    }
    static SequenceSpec finite_list(std::vector<Rational> v) { return {Kind::FiniteList, 0, 1, std::move(v)}; }
    /// Signed-entry shorthand: s > 0 is k^{-s}, s < 0 is (-1)^k k^{s}.
    static SequenceSpec signed_power(int s) { return s < 0 ? alt_power(-s) : power(s); }

    /// Exponent p with a_k = O(k^{-p}); infinite for finite lists.
    double decay_exponent() const { return kind == Kind::FiniteList ? INFINITY : static_cast<double>(s); }

    bool unit_modulus() const { return kind == Kind::Power || kind == Kind::AltPower; }

    void validate() const
    {
        if (kind == Kind::FiniteList) return;
        if (kind == Kind::GeometricPower) {
            if (abs(x) >= 1) throw std::invalid_argument("geometric_power needs |x| < 1");
            if (s < 0) throw std::invalid_argument("geometric_power needs s >= 0");
            return;
        }
        if (s < 2) throw std::invalid_argument("power sequences need decay exponent > 1");
    }

    /// Entry of the equivalent signed index (power kinds only).
    int signed_entry() const { return kind == Kind::AltPower ? -s : s; }

    /// Ratio bound sup |T_{n+1}| / |T_n| envelope; 1 for power kinds.
    Float envelope_ratio() const
    {
        switch (kind) {
        case Kind::GeometricPower: return abs(to_float(x));
        case Kind::FiniteList: return 0;
        default: return 1;
        }
    }

    /// Decreasing upper bound U(n) >= |A - A_m| for all m >= n (n >= 1).
    Float tail_envelope(std::uint64_t n) const
    {
        switch (kind) {
        case Kind::Power: return pow(Float(n), 1 - s) / (s - 1);
        case Kind::AltPower: return pow(Float(n + 1), -s);
        case Kind::GeometricPower: {
            Float ax = abs(to_float(x));
            return pow(ax, static_cast<long>(n + 1)) * pow(Float(n + 1), -s) / (1 - ax);
        }
        case Kind::FiniteList: return n >= list.size() ? Float(0) : Float(INFINITY);
        }
        return 0;
    }

    /// Tails A - A_n for n = 0..N.
    std::vector<Real> tails(std::uint64_t N, const PrecisionContext& ctx) const
    {
        std::vector<Real> t(N + 1);
        auto term = [&](std::uint64_t k) -> Float {
            switch (kind) {
            case Kind::Power: return signed_power_term<Float>(1, s, k);
            case Kind::AltPower: return signed_power_term<Float>(-1, s, k);
            case Kind::GeometricPower: return pow(to_float(x), static_cast<long>(k)) / pow(Float(k), s);
            case Kind::FiniteList: return k <= list.size() ? to_float(list[k - 1]) : Float(0);
            }
            return 0;
        };
        switch (kind) {
        case Kind::Power: t[N] = zeta_tail(s, N, ctx); break;
        case Kind::AltPower: t[N] = -alt_zeta_tail(s, N, ctx); break;
        case Kind::GeometricPower: {
            const Float floor = working_tol(ctx) * Float("1e-4");
            Float acc = 0;
            std::uint64_t k = N + 1;
            for (; tail_envelope(k - 1) > floor; ++k) acc += term(k);
            t[N] = Real(acc, tail_envelope(k - 1) + Float(k - N + 2) * unit_roundoff() * abs(acc));
            break;
        }
        case Kind::FiniteList: {
            Rational acc = 0;
            for (std::uint64_t k = N + 1; k <= list.size(); ++k) acc += list[k - 1];
            t[N] = Real::exact(acc);
            break;
        }
        }
        for (std::uint64_t n = N; n >= 1; --n) t[n - 1] = t[n] + Real(term(n));
        return t;
    }
};

namespace detail {

inline void require(bool ok, const std::string& msg)
{
    if (!ok) throw std::invalid_argument(msg);
}

inline SeriesMonomial mono(Real coeff, int n_exp, int n_sign, std::vector<SeriesFactor> f)
{
    return SeriesMonomial{std::move(coeff), n_exp, n_sign, std::move(f)};
}

inline Real zeta1(int s, const PrecisionContext& ctx) { return index_value(SignedIndex({s}), ctx); }

inline int sgn(int v) { return v < 0 ? -1 : 1; }

/// Sums sum_{n>=1} term(n) directly up to the first N with bound(N) <= floor.
inline SeriesValue direct_sum(const std::function<Real(std::uint64_t)>& term,
                              const std::function<Float(std::uint64_t)>& remainder_after, std::uint64_t N)
{
    Real acc = Real::exact(0);
    for (std::uint64_t n = 1; n <= N; ++n) acc += term(n);
    acc.widen(remainder_after(N));
    return {acc, N};
}

inline std::uint64_t first_below(const std::function<Float(std::uint64_t)>& bound, const Float& floor,
                                 const PrecisionContext& ctx)
{
    std::uint64_t N = 8;
    while (bound(N) > floor) {
        if (N * 2 > ctx.max_n) throw ToleranceNotMet("direct summation bound not met", bound(N).convert_to<double>());
        N *= 2;
    }
    // shrink back towards the smallest adequate N
    std::uint64_t lo = N / 2, hi = N;
    while (hi - lo > 1) {
        std::uint64_t mid = (lo + hi) / 2;
        (bound(mid) > floor ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace detail

/// F(A,B;x) = sum_n (A-A_n)(B-B_n) x^n.
inline SeriesValue tail_quadratic_value(const SequenceSpec& A, const SequenceSpec& B, const Rational& x,
                                        const PrecisionContext& ctx)
{
    A.validate();
    B.validate();
    detail::require(abs(x) <= 1, "F(A,B;x) needs |x| <= 1");
    ctx.ensure_active();
    if (A.kind == SequenceSpec::Kind::FiniteList && B.kind == SequenceSpec::Kind::FiniteList) {
        const std::size_t n = std::max(A.list.size(), B.list.size());
        std::vector<Rational> a = A.list, b = B.list;
        a.resize(n, Rational(0));
        b.resize(n, Rational(0));
        Rational TA = 0, TB = 0, acc = 0, xk = 1;
        for (auto& v : a) TA += v;
        for (auto& v : b) TB += v;
        for (std::size_t k = 0; k < n; ++k) {
            xk *= x;
            TA -= a[k];
            TB -= b[k];
            acc += TA * TB * xk;
        }
        return {Real::exact(acc), n};
    }
    if (A.unit_modulus() && B.unit_modulus() && abs(x) == 1) {
        detail::require(A.s + B.s >= 3 + (x == 1 ? 1 : 0) || A.kind == SequenceSpec::Kind::AltPower ||
                            B.kind == SequenceSpec::Kind::AltPower,
                        "F(A,B;1) diverges for these decay exponents");
        SeriesPlan plan;
        plan.add(detail::mono(Real::exact(1), 0, x == 1 ? 1 : -1,
                              {detail::tail(SignedIndex({A.signed_entry()})), detail::tail(SignedIndex({B.signed_entry()}))}));
        return evaluate_series(plan, ctx);
    }
    const Float ax = abs(to_float(x));
    const Float rho = A.envelope_ratio() * B.envelope_ratio() * ax;
    if (rho >= 1) throw DivergentSeries("F(A,B;x): no geometric decay to bound the remainder");
    auto remainder = [&](std::uint64_t N) {
        return A.tail_envelope(N + 1) * B.tail_envelope(N + 1) * pow(ax, static_cast<long>(N + 1)) / (1 - rho);
    };
    const Float floor = working_tol(ctx);
    std::uint64_t N = detail::first_below(remainder, floor, ctx);
    auto ta = A.tails(N, ctx), tb = B.tails(N, ctx);
    const Float xf = to_float(x);
    return detail::direct_sum([&](std::uint64_t n) { return ta[n] * tb[n] * Real(pow(xf, static_cast<long>(n))); },
                              remainder, N);
}

inline Real tail_quadratic_numeric(const SequenceSpec& A, const SequenceSpec& B, const Rational& x,
                                   const PrecisionContext& ctx)
{
    return tail_quadratic_value(A, B, x, ctx).value;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// One builder argument: a rational, or a bare '+'/'-' sign token.
struct BuilderArg {
    Rational value = 0;
    bool sign_token = false;

    std::string text() const
    {
        if (sign_token) return value < 0 ? "-" : "+";
        return value.str();
    }
    friend bool operator==(const BuilderArg& a, const BuilderArg& b)
    {
        return a.sign_token == b.sign_token && a.value == b.value;
    }
};

/// A left-hand-side series: family name plus ';'-separated argument groups.
struct TailSeriesSpec {
    std::string family;
    std::vector<std::vector<BuilderArg>> groups;

    std::string text() const
    {
        std::string out = family + "(";
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (g) out += ';';
            for (std::size_t i = 0; i < groups[g].size(); ++i) {
                if (i) out += ',';
                out += groups[g][i].text();
            }
        }
        return out + ")";
    }
    friend bool operator==(const TailSeriesSpec& a, const TailSeriesSpec& b)
    {
        return a.family == b.family && a.groups == b.groups;
    }
};

/// Builds a spec from integer groups, e.g. make_spec("W", {{2,3},{1}}).
inline TailSeriesSpec make_spec(std::string family, const std::vector<std::vector<long>>& groups)
{
    TailSeriesSpec s{std::move(family), {}};
    for (const auto& g : groups) {
        std::vector<BuilderArg> args;
        for (long v : g) args.push_back({Rational(v), false});
        s.groups.push_back(std::move(args));
    }
    return s;
}

namespace detail {

class Args {
  public:
    explicit Args(const TailSeriesSpec& s) : s_(s) {}

    void shape(std::initializer_list<std::size_t> sizes) const
    {
        std::vector<std::size_t> want(sizes);
        bool ok = s_.groups.size() == want.size();
        for (std::size_t g = 0; ok && g < want.size(); ++g) ok = s_.groups[g].size() == want[g];
        require(ok, s_.family + ": wrong argument shape in " + s_.text());
    }
    std::size_t groups() const { return s_.groups.size(); }
    std::size_t size(std::size_t g) const { return s_.groups.at(g).size(); }

    int integer(std::size_t g, std::size_t i) const
    {
        const auto& a = s_.groups.at(g).at(i);
        require(!a.sign_token && denominator(a.value) == 1, s_.family + ": integer argument expected");
        require(abs(a.value) < 10000, s_.family + ": argument out of range");
        return static_cast<int>(numerator(a.value));
    }
    Rational rational(std::size_t g, std::size_t i) const
    {
        const auto& a = s_.groups.at(g).at(i);
        require(!a.sign_token, s_.family + ": rational argument expected");
        return a.value;
    }
    /// '+' -> +1 (plain sum), '-' -> -1 (alternating factor (-1)^{n-1}).
    int sign(std::size_t g, std::size_t i) const
    {
        const auto& a = s_.groups.at(g).at(i);
        require(a.sign_token, s_.family + ": '+' or '-' expected");
        return a.value < 0 ? -1 : 1;
    }

  private:
    const TailSeriesSpec& s_;
};

inline void require_decay(int s, const std::string& who)
{
    require(s != 0 && std::abs(s) >= 2, who + ": entries need |s| >= 2");
}

/// T12(m,p;r): right side of the cubic Abel-type theorem for a_k = k^{-m},
/// b_k = k^{-p} (negative entries are alternating).
inline SeriesPlan abel_x1_plan(int m, int p, const PrecisionContext& ctx)
{
    // sum_n (sum_{k<=n} k a_k) b_n + mirror - sum n a_n b_n - A B
    SeriesPlan plan;
    auto one = [&](int u, int v) {
        int e = sgn(u) * (std::abs(u) - 1);
        plan.add(mono(Real::exact(1), std::abs(v), sgn(v), {partial(SignedIndex({e}))}));
    };
    one(m, p);
    one(p, m);
    plan.add(mono(Real::exact(-1), std::abs(m) + std::abs(p) - 1, sgn(m) * sgn(p), {}));
    plan.constant = -(zeta1(m, ctx) * zeta1(p, ctx));
    return plan;
}

inline SeriesPlan cubic_abel_plan(int m, int p, int r, const PrecisionContext& ctx)
{
    SeriesPlan plan = abel_x1_plan(m, p, ctx).scaled(zeta1(r, ctx));
    auto side = [&](int u, int v) {
        // - sum_n (sum_{k<=n} a_k (k zeta_k(r) - zeta_k(r-1))) b_n
        int e = sgn(u) * (std::abs(u) - 1);
        plan.add(mono(Real::exact(-1), std::abs(v), sgn(v), {partial(SignedIndex({e, r}, true))}));
        plan.add(mono(Real::exact(1), std::abs(v), sgn(v), {partial(SignedIndex({u, r - 1}, true))}));
    };
    side(m, p);
    side(p, m);
    // + sum_n a_n b_n (n zeta_n(r) - zeta_n(r-1))
    const int w = std::abs(m) + std::abs(p);
    plan.add(mono(Real::exact(1), w - 1, sgn(m) * sgn(p), {partial(SignedIndex({r}))}));
    plan.add(mono(Real::exact(-1), w, sgn(m) * sgn(p), {partial(SignedIndex({r - 1}))}));
    return plan;
}

inline SeriesPlan weighted_abel_plan(int m, int p, int r)
{
    // sum_n (sum_{k<=n} a_k zeta_{k-1}(r)) b_n + mirror - sum a_n b_n zeta_{n-1}(r)
    SeriesPlan plan;
    plan.add(mono(Real::exact(1), std::abs(p), sgn(p), {partial(SignedIndex({m, r}))}));
    plan.add(mono(Real::exact(1), std::abs(m), sgn(m), {partial(SignedIndex({p, r}))}));
    plan.add(mono(Real::exact(-1), std::abs(m) + std::abs(p), sgn(m) * sgn(p), {partial_below(SignedIndex({r}))}));
    return plan;
}

/// One half of the reflection sum: sum_n y^n n^{-m} sum_{k<=n} x^k k^{-p}.
inline SeriesValue reflection_half(int p, int m, const Rational& x, const Rational& y, const PrecisionContext& ctx)
{
    const Float xf = to_float(x), yf = to_float(y);
    const Float ax = abs(xf), ay = abs(yf);
    const Float floor = working_tol(ctx);
    if (abs(x) == 1 && abs(y) == 1) {
        SeriesPlan plan;
        plan.add(mono(Real::exact(1), m, y < 0 ? -1 : 1, {partial(SignedIndex({x < 0 ? -p : p}))}));
        return evaluate_series(plan, ctx);
    }
    if (abs(y) < 1) {
        // |inner| <= 1 + ln n; consecutive envelope ratio <= |y| (1 + 1/n)
        auto remainder = [&](std::uint64_t N) {
            Float rho = ay * (1 + Float(1) / Float(N + 1));
            if (rho >= 1) return Float(INFINITY);
            return pow(ay, static_cast<long>(N + 1)) * (1 + log(Float(N + 1))) / (1 - rho);
        };
        std::uint64_t N = first_below(remainder, floor, ctx);
        Float inner = 0, xp = 1, yp = 1, acc = 0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            xp *= xf;
            yp *= yf;
            inner += xp / pow(Float(n), p);
            acc += yp / pow(Float(n), m) * inner;
        }
        Real out(acc, remainder(N) + 4 * Float(N) * unit_roundoff() * (abs(acc) + 1));
        return {out, N};
    }
    // |y| = 1, |x| < 1: inner = Li_p(x) - Q(n), Q(n) = sum_{k>n} x^k k^{-p}
    Real head = polylog(p, x, ctx) * zeta1(y < 0 ? -m : m, ctx);
    auto remainder = [&](std::uint64_t N) { return pow(ax, static_cast<long>(N + 2)) / ((1 - ax) * (1 - ax)); };
    std::uint64_t N = first_below(remainder, floor, ctx);
    SequenceSpec q = SequenceSpec::geometric_power(p, x);
    auto Q = q.tails(N, ctx);
    Real acc = Real::exact(0);
    for (std::uint64_t n = 1; n <= N; ++n) acc += Real(signed_power_term<Float>(y < 0 ? -1 : 1, m, n)) * Q[n];
    acc.widen(remainder(N));
    return {head - acc, N};
}

}  // namespace detail

/// The families accepted as series builders, with their argument shapes.
inline const std::map<std::string, std::string>& builder_families()
{
    static const std::map<std::string, std::string> f{
        {"F2", "F2(m,p[;x]): sum (A-A_n)(B-B_n) x^n for a_k = k^{-m}, b_k = k^{-p}"},
        {"F2alt", "F2alt(m,p): sum (A-A_n)(B-B_n) (-1)^{n-1}"},
        {"F3", "F3(m,p,r): sum of the product of three tails"},
        {"W", "W(m,p;r): sum (A-A_n)(B-B_n)/n^r"},
        {"Q", "Q(a1,...,aj;r[;+|-]): sum prod zeta_n(a_i)/n^r, '-' adds (-1)^{n-1}"},
        {"LS", "LS(s;m[;+|-]): sum zeta_n(s)/n^m, '-' adds (-1)^{n-1}"},
        {"L", "L(m): sum (zeta(m)-zeta_n(m))/n"},
        {"PT", "PT(m,p;k): sum zeta_n(m)(zeta(p)-zeta_n(p))/n^k"},
        {"M", "M(m,p;k): sum (zeta(m)zeta_n(p) - zeta(p)zeta_n(m))/n^k"},
        {"C2", "C2(m,p;k): sum (zeta(m)zeta(p) - zeta_n(m)zeta_n(p))/n^k"},
        {"C3", "C3(m,p,q;k): sum (zeta_n(m)zeta(p)zeta(q) - zeta(m)zeta_n(p)zeta_n(q))/n^k"},
        {"X3", "X3(m,p,q;k): sum (zeta(m)zeta_n(p)zeta_n(q) - zeta(p)zeta_n(m)zeta_n(q))/n^k"},
        {"R", "R(p,m;x,y): sum y^n/n^m sum_{k<=n} x^k/k^p + the mirrored sum"},
        {"FS2", "FS2(p,q): sum of products of zeta*(p+1,p) and zeta*(q+1,q) tails"},
        {"FS3", "FS3(p): sum of products of zeta*(p+1,p) and zeta*(p+2,p) tails"},
        {"T32", "T32(m,p): Abel-summation right side of F2(m,p;1)"},
        {"T39", "T39(m,p;r): Abel-summation right side of W(m,p;r)"},
        {"T12", "T12(m,p;r): Abel-summation right side of F3(m,p,r)"},
    };
    return f;
}

/// Numeric value of any builder series.
inline SeriesValue evaluate_builder(const TailSeriesSpec& spec, const PrecisionContext& ctx)
{
    using namespace detail;
    ctx.ensure_active();
    const Args a(spec);
    const std::string& f = spec.family;
    auto z = [&](int s) { return zeta1(s, ctx); };
    auto T = [](int s) { return tail(SignedIndex({s})); };
    auto P = [](int s) { return partial(SignedIndex({s})); };
    SeriesPlan plan;

    if (f == "F2") {
        if (a.groups() == 1)
            a.shape({2});
        else
            a.shape({2, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1);
        require_decay(m, f);
        require_decay(p, f);
        Rational x = a.groups() == 2 ? a.rational(1, 0) : Rational(1);
        return tail_quadratic_value(SequenceSpec::signed_power(m), SequenceSpec::signed_power(p), x, ctx);
    }
    if (f == "F2alt") {
        a.shape({2});
        int m = a.integer(0, 0), p = a.integer(0, 1);
        require_decay(m, f);
        require_decay(p, f);
        plan.add(mono(Real::exact(-1), 0, -1, {T(m), T(p)}));
    } else if (f == "F3") {
        a.shape({3});
        int m = a.integer(0, 0), p = a.integer(0, 1), r = a.integer(0, 2);
        require_decay(m, f);
        require_decay(p, f);
        require_decay(r, f);
        plan.add(mono(Real::exact(1), 0, 1, {T(m), T(p), T(r)}));
    } else if (f == "W") {
        a.shape({2, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), r = a.integer(1, 0);
        require_decay(m, f);
        require_decay(p, f);
        require(r >= 1, "W: r >= 1");
        plan.add(mono(Real::exact(1), r, 1, {T(m), T(p)}));
    } else if (f == "Q" || f == "LS") {
        require(a.groups() == 2 || a.groups() == 3, f + ": wrong argument shape");
        require(a.size(1) == 1 && (a.groups() == 2 || a.size(2) == 1), f + ": wrong argument shape");
        if (f == "LS") require(a.size(0) == 1, "LS takes one partial-sum entry");
        std::vector<SeriesFactor> fs;
        for (std::size_t i = 0; i < a.size(0); ++i) {
            int s = a.integer(0, i);
            require(s != 0, f + ": zero entry");
            fs.push_back(P(s));
        }
        int r = a.integer(1, 0);
        require(r >= 1, f + ": exponent >= 1");
        int alt = a.groups() == 3 ? a.sign(2, 0) : 1;
        if (alt < 0)
            plan.add(mono(Real::exact(-1), r, -1, fs));
        else
            plan.add(mono(Real::exact(1), r, 1, fs));
    } else if (f == "L") {
        a.shape({1});
        int m = a.integer(0, 0);
        require_decay(m, f);
        plan.add(mono(Real::exact(1), 1, 1, {T(m)}));
    } else if (f == "PT") {
        a.shape({2, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), k = a.integer(1, 0);
        require(m != 0, "PT: zero entry");
        require_decay(p, f);
        require(k >= 1, "PT: k >= 1");
        plan.add(mono(Real::exact(1), k, 1, {P(m), T(p)}));
    } else if (f == "M") {
        // zeta(m)zeta_n(p) - zeta(p)zeta_n(m) = zeta(p)T_n(m) - zeta(m)T_n(p)
        a.shape({2, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), k = a.integer(1, 0);
        require_decay(m, f);
        require_decay(p, f);
        require(k >= 1, "M: k >= 1");
        plan.add(mono(z(p), k, 1, {T(m)}));
        plan.add(mono(-z(m), k, 1, {T(p)}));
    } else if (f == "C2") {
        // zeta(m)zeta(p) - zeta_n(m)zeta_n(p) = zeta(m)T(p) + zeta(p)T(m) - T(m)T(p)
        a.shape({2, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), k = a.integer(1, 0);
        require_decay(m, f);
        require_decay(p, f);
        require(k >= 1, "C2: k >= 1");
        plan.add(mono(z(m), k, 1, {T(p)}));
        plan.add(mono(z(p), k, 1, {T(m)}));
        plan.add(mono(Real::exact(-1), k, 1, {T(m), T(p)}));
    } else if (f == "C3") {
        // zeta_n(m)zeta(p)zeta(q) - zeta(m)zeta_n(p)zeta_n(q)
        //   = -zeta(p)zeta(q)T(m) + zeta(m)[zeta(q)T(p) + zeta(p)T(q) - T(p)T(q)]
        a.shape({3, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), q = a.integer(0, 2), k = a.integer(1, 0);
        require_decay(m, f);
        require_decay(p, f);
        require_decay(q, f);
        require(k >= 1, "C3: k >= 1");
        plan.add(mono(-(z(p) * z(q)), k, 1, {T(m)}));
        plan.add(mono(z(m) * z(q), k, 1, {T(p)}));
        plan.add(mono(z(m) * z(p), k, 1, {T(q)}));
        plan.add(mono(-z(m), k, 1, {T(p), T(q)}));
    } else if (f == "X3") {
        // zeta_n(q)[zeta(m)zeta_n(p) - zeta(p)zeta_n(m)] = zeta_n(q)[zeta(p)T(m) - zeta(m)T(p)]
        a.shape({3, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), q = a.integer(0, 2), k = a.integer(1, 0);
        require_decay(m, f);
        require_decay(p, f);
        require(q != 0, "X3: zero entry");
        require(k >= 1, "X3: k >= 1");
        plan.add(mono(z(p), k, 1, {P(q), T(m)}));
        plan.add(mono(-z(m), k, 1, {P(q), T(p)}));
    } else if (f == "R") {
        a.shape({2, 2});
        int p = a.integer(0, 0), m = a.integer(0, 1);
        Rational x = a.rational(1, 0), y = a.rational(1, 1);
        require(p >= 1 && m >= 1, "R: p, m >= 1");
        require(abs(x) <= 1 && abs(y) <= 1, "R: |x|, |y| <= 1");
        require(!(x == 1 && p == 1) && !(y == 1 && m == 1), "R: divergent corner");
        auto h1 = reflection_half(p, m, x, y, ctx);
        auto h2 = reflection_half(m, p, y, x, ctx);
        return {h1.value + h2.value, std::max(h1.terms_used, h2.terms_used)};
    } else if (f == "FS2" || f == "FS3") {
        a.shape({f == "FS2" ? 2u : 1u});
        int p = a.integer(0, 0);
        int q = f == "FS2" ? a.integer(0, 1) : p;
        require(p >= 1 && q >= 1, f + ": arguments >= 1");
        SignedIndex u({p + 1, p}, true);
        SignedIndex v = f == "FS2" ? SignedIndex({q + 1, q}, true) : SignedIndex({p + 2, p}, true);
        plan.add(mono(Real::exact(1), 0, 1, {tail(u), tail(v)}));
    } else if (f == "T32") {
        a.shape({2});
        int m = a.integer(0, 0), p = a.integer(0, 1);
        require_decay(m, f);
        require_decay(p, f);
        plan = abel_x1_plan(m, p, ctx);
    } else if (f == "T39") {
        a.shape({2, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), r = a.integer(1, 0);
        require_decay(m, f);
        require_decay(p, f);
        require(r >= 1, "T39: r >= 1");
        plan = weighted_abel_plan(m, p, r);
    } else if (f == "T12") {
        a.shape({2, 1});
        int m = a.integer(0, 0), p = a.integer(0, 1), r = a.integer(1, 0);
        require_decay(m, f);
        require_decay(p, f);
        require(r >= 2, "T12: r >= 2");
        plan = cubic_abel_plan(m, p, r, ctx);
    } else {
        throw std::invalid_argument("unknown series family " + f);
    }
    return evaluate_series(plan, ctx);
}

/// Cubic tail sum F(zeta(m), zeta(p), zeta(r)).
inline Real tail_cubic_numeric(int m, int p, int r, const PrecisionContext& ctx)
{
    return evaluate_builder(make_spec("F3", {{m, p, r}}), ctx).value;
}

/// Any builder family, including the weighted and mixed ones.
inline Real weighted_series_numeric(const TailSeriesSpec& spec, const PrecisionContext& ctx)
{
    return evaluate_builder(spec, ctx).value;
}

// ---------------------------------------------------------------------------
// Formula catalog
// ---------------------------------------------------------------------------

/// constants + sum coeff_i * series_i.
struct SeriesCombination {
    LinComb constants;
    std::vector<std::pair<LinComb, TailSeriesSpec>> series;

    SeriesCombination() = default;
    SeriesCombination(LinComb c) : constants(std::move(c)) {}  // NOLINT: implicit by design
    SeriesCombination(TailSeriesSpec s) { series.emplace_back(LinComb::constant(1), std::move(s)); }  // NOLINT

    SeriesCombination& operator+=(const SeriesCombination& o)
    {
        constants += o.constants;
        series.insert(series.end(), o.series.begin(), o.series.end());
        return *this;
    }
    friend SeriesCombination operator+(SeriesCombination a, const SeriesCombination& b) { return a += b; }
    friend SeriesCombination operator*(const LinComb& c, SeriesCombination a)
    {
        a.constants = c * a.constants;
        for (auto& s : a.series) s.first = c * s.first;
        return a;
    }
    friend SeriesCombination operator*(const Rational& q, SeriesCombination a) { return LinComb::constant(q) * a; }
    friend SeriesCombination operator-(SeriesCombination a, const SeriesCombination& b)
    {
        return a += Rational(-1) * b;
    }
};

struct CombinationValue {
    Real value;
    std::uint64_t terms_used = 0;
};

inline CombinationValue evaluate_combination(const SeriesCombination& c, const PrecisionContext& ctx)
{
    Real v = lincomb_numeric(c.constants, ctx);
    std::uint64_t terms = 0;
    for (const auto& [coeff, spec] : c.series) {
        auto s = evaluate_builder(spec, ctx);
        v += lincomb_numeric(coeff, ctx) * s.value;
        terms = std::max(terms, s.terms_used);
    }
    return {v, terms};
}

struct CatalogEntry {
    std::string id;
    std::string description;
    std::string constraints;
    std::size_t arity = 0;
    std::function<void(const std::vector<int>&)> check;
    std::function<SeriesCombination(const std::vector<int>&)> lhs;
    std::function<SeriesCombination(const std::vector<int>&)> rhs;
};

namespace detail {

inline LinComb zv(std::vector<int> e) { return LinComb::symbol(SignedIndex(std::move(e))); }
inline LinComb zsv(std::vector<int> e) { return LinComb::symbol(SignedIndex(std::move(e), true)); }
inline LinComb cq(long num, long den = 1) { return LinComb::constant(Rational(num, den)); }
/// Entry with the sign of `like` and absolute value |v|.
inline int bar(int v) { return -v; }

inline TailSeriesSpec spec(std::string f, std::vector<std::vector<long>> g) { return make_spec(std::move(f), g); }

inline void need(bool ok, const char* what)
{
    if (!ok) throw std::invalid_argument(std::string("parameter constraint violated: ") + what);
}

inline std::vector<CatalogEntry> build_catalog()
{
    std::vector<CatalogEntry> c;
    auto ge2 = [](std::initializer_list<int> v) {
        for (int x : v)
            if (x < 2) return false;
        return true;
    };

    c.push_back({"F-quad", "sum of products of two zeta tails", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F2", {{q[0], q[1]}, {1}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(zv({p, m - 1}) + zv({m, p - 1}) + zv({m + p - 1}) - zv({m}) * zv({p}));
                 }});
    c.push_back({"F-quad-alt", "sum of products of two alternating zeta tails", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F2", {{-q[0], -q[1]}, {1}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(zv({-m, -(p - 1)}) + zv({-p, -(m - 1)}) + zv({m + p - 1}) -
                                              zv({-m}) * zv({-p}));
                 }});
    c.push_back({"F-quad-mixed", "sum of products of a zeta tail and an alternating zeta tail", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F2", {{q[0], -q[1]}, {1}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(zv({m, -(p - 1)}) + zv({-p, m - 1}) + zv({-(m + p - 1)}) -
                                              zv({m}) * zv({-p}));
                 }});
    // F(zeta(m), zbar(p)) where zbar(s) = sum (-1)^{j-1} j^{-s} = -zeta(-s)
    auto zbar_lhs = [](const std::vector<int>& q) {
        return Rational(-1) * SeriesCombination(spec("F2", {{q[0], -q[1]}, {1}}));
    };
    c.push_back({"zbar-quad-bar-form", "zeta tail times alternating-harmonic tail, alternating-zeta form",
                 "m,p >= 2", 2, [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); }, zbar_lhs,
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     // -zs(pbar,m-1) - zs(m,(p-1)bar) - zeta(m) zbar(p) - zbar(m+p-1)
                     LinComb zbar_p = cq(-1) * zv({-p}), zbar_w = cq(-1) * zv({-(m + p - 1)});
                     return SeriesCombination(cq(-1) * zsv({-p, m - 1}) - zsv({m, -(p - 1)}) - zv({m}) * zbar_p -
                                              zbar_w);
                 }});
    c.push_back({"zbar-quad-sgn-form", "zeta tail times alternating-harmonic tail, signed-entry form", "m,p >= 2",
                 2, [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); }, zbar_lhs,
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(zv({m}) * zv({-p}) + zv({-(m + p - 1)}) - zsv({-p, m - 1}) -
                                              zsv({m, -(p - 1)}));
                 }});
    c.push_back({"F-cubic-star", "sum of products of three zeta tails, star form", "m,p,r >= 2", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1], q[2]}), "m,p,r >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F3", {{q[0], q[1], q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], r = q[2];
                     LinComb v = zv({r}) * (zsv({p, m - 1}) + zsv({m, p - 1}) - zv({m + p - 1}) - zv({m}) * zv({p}));
                     v += zsv({m + p - 1, r}) - zsv({m + p, r - 1});
                     v -= zsv({p, m - 1, r}) - zsv({p, m, r - 1});
                     v -= zsv({m, p - 1, r}) - zsv({m, p, r - 1});
                     return SeriesCombination(v);
                 }});
    c.push_back({"F-cubic", "sum of products of three zeta tails, multiple zeta form", "m,p,r >= 2", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1], q[2]}), "m,p,r >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F3", {{q[0], q[1], q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], r = q[2];
                     LinComb v = zv({p, m, r - 1}) + zv({p, r, m - 1}) + zv({m, p, r - 1}) + zv({m, r, p - 1}) +
                                 zv({r, p, m - 1}) + zv({r, m, p - 1}) + zv({m + p, r - 1}) + zv({p + r, m - 1}) +
                                 zv({m + r, p - 1}) + zv({p, m + r - 1}) + zv({m, p + r - 1}) +
                                 zv({r, p + m - 1}) + zv({m + p + r - 1}) - zv({p}) * zv({m}) * zv({r});
                     return SeriesCombination(v);
                 }});
    c.push_back({"cubic-abel", "cubic tail sum against its Abel-summation series", "m,p,r >= 2", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1], q[2]}), "m,p,r >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F3", {{q[0], q[1], q[2]}})); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("T12", {{q[0], q[1]}, {q[2]}})); }});
    c.push_back({"weighted-quad", "weighted sum of two zeta tails", "m,p >= 2, r >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, r >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("W", {{q[0], q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], r = q[2];
                     return SeriesCombination(zv({m, p, r}) + zv({p, m, r}) + zv({m + p, r}));
                 }});
    c.push_back({"weighted-abel", "weighted tail sum against its Abel-summation series", "m,p >= 2, r >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, r >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("W", {{q[0], q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("T39", {{q[0], q[1]}, {q[2]}})); }});
    c.push_back({"abel-x1", "quadratic tail sum against its Abel-summation series", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F2", {{q[0], q[1]}, {1}})); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("T32", {{q[0], q[1]}})); }});
    c.push_back({"harmonic-quad", "quadratic harmonic sum, star form", "r >= 2, m,p >= 1", 3,
                 [](const std::vector<int>& q) { need(q[2] >= 2 && q[0] >= 1 && q[1] >= 1, "r >= 2, m,p >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("Q", {{q[0], q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], r = q[2];
                     return SeriesCombination(zsv({r, m, p}) + zsv({r, p, m}) - zsv({r, m + p}));
                 }});
    c.push_back({"harmonic-quad-split", "quadratic harmonic sum split by one constant", "p,m >= 2, r >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "p,m >= 2, r >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("Q", {{q[0], q[2]}, {q[1]}})); },
                 [](const std::vector<int>& q) {
                     int p = q[0], m = q[1], r = q[2];
                     return SeriesCombination(zsv({p + m, r}) + zv({p}) * zsv({m, r}) - zsv({p, m, r}));
                 }});
    c.push_back({"sym-triple", "cyclic sum of three quadratic harmonic sums", "m,p,r >= 2", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1], q[2]}), "m,p,r >= 2"); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], r = q[2];
                     return SeriesCombination(spec("Q", {{m, p}, {r}})) + SeriesCombination(spec("Q", {{p, r}, {m}})) +
                            SeriesCombination(spec("Q", {{m, r}, {p}}));
                 },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], r = q[2];
                     return SeriesCombination(zsv({p + m, r}) + zsv({p + r, m}) + zsv({m + r, p}) +
                                              zv({p}) * zv({m}) * zv({r}) - zv({p + m + r}));
                 }});
    c.push_back({"alt-quad", "alternating sum of products of two zeta tails", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("F2alt", {{q[0], q[1]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(
                         cq(1, 2) * (zv({m}) * zv({p}) + zv({m, -p}) + zv({p, -m}) + zv({-(m + p)})));
                 }});
    c.push_back({"star-tail-quad", "sum of products of two star-value tails", "p,q >= 1", 2,
                 [](const std::vector<int>& q) { need(q[0] >= 1 && q[1] >= 1, "p,q >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("FS2", {{q[0], q[1]}})); },
                 [](const std::vector<int>& a) {
                     int p = a[0], q = a[1];
                     SeriesCombination s = SeriesCombination(spec("Q", {{p, p, q}, {q + 1}})) +
                                           SeriesCombination(spec("Q", {{2 * p, q}, {q + 1}})) +
                                           SeriesCombination(spec("Q", {{q, q, p}, {p + 1}})) +
                                           SeriesCombination(spec("Q", {{2 * q, p}, {p + 1}}));
                     return Rational(1, 2) * s - SeriesCombination(spec("Q", {{p, q}, {p + q + 1}})) -
                            SeriesCombination(zsv({p + 1, p}) * zsv({q + 1, q}));
                 }});
    c.push_back({"star-tail-shift", "sum of products of two shifted star-value tails", "p >= 1", 1,
                 [](const std::vector<int>& q) { need(q[0] >= 1, "p >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("FS3", {{q[0]}})); },
                 [](const std::vector<int>& a) {
                     int p = a[0];
                     SeriesCombination s = SeriesCombination(spec("Q", {{p, p, p}, {p + 2}})) +
                                           SeriesCombination(spec("Q", {{p, 2 * p}, {p + 2}})) -
                                           SeriesCombination(spec("Q", {{p, p}, {2 * p + 2}}));
                     return Rational(1, 2) * s +
                            SeriesCombination(cq(1, 2) * zsv({p + 1, p}) * zsv({p + 1, p}) -
                                              zsv({p + 1, p}) * zsv({p + 2, p}));
                 }});
    c.push_back({"mixed-linear", "mixed linear tail sum with weight 1/n", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("M", {{q[0], q[1]}, {1}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(zv({p}) * zv({m, 1}) - zv({m}) * zv({p, 1}));
                 }});
    c.push_back({"mixed-tail", "mixed tail sum with weight 1/n^k", "m,p >= 2, k >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, k >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("M", {{q[0], q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], k = q[2];
                     return SeriesCombination(zv({p}) * zv({m, k}) - zv({m}) * zv({p, k}));
                 }});
    c.push_back({"linear-tail", "sum of zeta tails over n", "m >= 2", 1,
                 [](const std::vector<int>& q) { need(q[0] >= 2, "m >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("L", {{q[0]}})); },
                 [](const std::vector<int>& q) { return SeriesCombination(zv({q[0], 1})); }});
    c.push_back({"product-deficit-linear", "product deficit over n against harmonic sums", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("C2", {{q[0], q[1]}, {1}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(spec("Q", {{1, m}, {p}})) + SeriesCombination(spec("Q", {{1, p}, {m}})) +
                            SeriesCombination(zsv({p, m + 1}) - zv({p}) * zv({m + 1}) - zsv({p + m, 1}) -
                                              zsv({p + 1, m}));
                 }});
    c.push_back({"triple-deficit-linear", "triple deficit over n against harmonic sums", "m,p,q >= 2", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1], q[2]}), "m,p,q >= 2"); },
                 [](const std::vector<int>& a) { return SeriesCombination(spec("C3", {{a[0], a[1], a[2]}, {1}})); },
                 [](const std::vector<int>& a) {
                     int m = a[0], p = a[1], q = a[2];
                     SeriesCombination inner = SeriesCombination(spec("Q", {{1, q}, {p}})) +
                                               SeriesCombination(spec("Q", {{1, p}, {q}})) +
                                               SeriesCombination(zsv({p, q + 1}) - zsv({p + q, 1}) -
                                                                 zsv({p + 1, q}) - zv({p}) * zv({q + 1}));
                     return zv({m}) * inner - SeriesCombination(zv({p}) * zv({q}) * zv({m, 1}));
                 }});
    c.push_back({"triple-mixed-linear", "mixed triple sum over n against harmonic sums", "p,m >= 2, q >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "p,m >= 2, q >= 1"); },
                 [](const std::vector<int>& a) { return SeriesCombination(spec("X3", {{a[0], a[1], a[2]}, {1}})); },
                 [](const std::vector<int>& a) {
                     int m = a[0], p = a[1], q = a[2];
                     SeriesCombination first = SeriesCombination(spec("Q", {{1, m}, {q}})) +
                                               SeriesCombination(spec("Q", {{1, q}, {m}})) +
                                               SeriesCombination(cq(-1) * zsv({q + 1, m}) - zsv({m + q, 1}) -
                                                                 zsv({m + 1, q}));
                     SeriesCombination second = SeriesCombination(spec("Q", {{1, q}, {p}})) +
                                                SeriesCombination(spec("Q", {{1, p}, {q}})) +
                                                SeriesCombination(cq(-1) * zsv({q + 1, p}) - zsv({p + q, 1}) -
                                                                  zsv({p + 1, q}));
                     return zv({p}) * first - zv({m}) * second +
                            SeriesCombination(zv({m + q + 1}) * zv({p}) - zv({p + q + 1}) * zv({m}));
                 }});
    c.push_back({"partial-tail", "harmonic partial sum times zeta tail over n", "m >= 1, p >= 2", 2,
                 [](const std::vector<int>& q) { need(q[0] >= 1 && q[1] >= 2, "m >= 1, p >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("PT", {{q[0], q[1]}, {1}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(zv({p, 1, m}) + zv({p, m + 1}));
                 }});
    c.push_back({"harmonic-pair", "symmetric pair of harmonic-number sums", "m,p >= 2", 2,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}), "m,p >= 2"); },
                 [](const std::vector<int>& q) {
                     return SeriesCombination(spec("Q", {{1, q[0]}, {q[1]}})) +
                            SeriesCombination(spec("Q", {{1, q[1]}, {q[0]}}));
                 },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1];
                     return SeriesCombination(zv({p}) * zv({m, 1}) + zv({p}) * zv({m + 1}) + zv({p + m, 1}) +
                                              zv({p + 1, m}) + zv({p + m + 1}) + zv({p, 1, m}));
                 }});
    c.push_back({"product-deficit", "product deficit weighted by 1/n^k", "m,p >= 2, k >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, k >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("C2", {{q[0], q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], k = q[2];
                     return SeriesCombination(zv({p}) * zv({m, k}) + zv({p, k, m}) + zv({p, m + k}));
                 }});
    c.push_back({"triple-deficit", "triple deficit weighted by 1/n^k", "m,p,q >= 2, k >= 1", 4,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1], q[2]}) && q[3] >= 1, "m,p,q >= 2, k >= 1"); },
                 [](const std::vector<int>& a) {
                     return SeriesCombination(spec("C3", {{a[0], a[1], a[2]}, {a[3]}}));
                 },
                 [](const std::vector<int>& a) {
                     int m = a[0], p = a[1], q = a[2], k = a[3];
                     return SeriesCombination(zv({m}) * (zv({p}) * zv({q, k}) + zv({p, k, q}) + zv({p, q + k})) -
                                              zv({p}) * zv({q}) * zv({m, k}));
                 }});
    c.push_back({"triple-mixed", "mixed triple sum weighted by 1/n^k", "m,p >= 2, q >= 1, k >= 1", 4,
                 [=](const std::vector<int>& q) {
                     need(ge2({q[0], q[1]}) && q[2] >= 1 && q[3] >= 1, "m,p >= 2, q >= 1, k >= 1");
                 },
                 [](const std::vector<int>& a) {
                     return SeriesCombination(spec("X3", {{a[0], a[1], a[2]}, {a[3]}}));
                 },
                 [](const std::vector<int>& a) {
                     int m = a[0], p = a[1], q = a[2], k = a[3];
                     return SeriesCombination(zv({p}) * (zv({m, k, q}) + zv({m, q + k})) -
                                              zv({m}) * (zv({p, k, q}) + zv({p, q + k})));
                 }});
    c.push_back({"harmonic-quad-closed", "quadratic harmonic sum in multiple zeta values", "m,p,k >= 2", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1], q[2]}), "m,p,k >= 2"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("Q", {{q[0], q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], k = q[2];
                     return SeriesCombination(zv({p}) * zv({m}) * zv({k}) - zv({p}) * zv({m, k}) - zv({p, k, m}) -
                                              zv({p, k + m}));
                 }});
    // alternating generalizations of the mixed and deficit sums
    c.push_back({"mixed-tail-alt2", "mixed tail sum, both entries alternating", "m,p >= 2, k >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, k >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("M", {{-q[0], -q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], k = q[2];
                     return SeriesCombination(zv({-p}) * zv({-m, k}) - zv({-m}) * zv({-p, k}));
                 }});
    c.push_back({"mixed-tail-alt1", "mixed tail sum, first entry alternating", "m,p >= 2, k >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, k >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("M", {{-q[0], q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], k = q[2];
                     return SeriesCombination(zv({p}) * zv({-m, k}) - zv({-m}) * zv({p, k}));
                 }});
    c.push_back({"square-deficit-alt", "deficit of an alternating square", "p >= 2, k >= 1", 2,
                 [](const std::vector<int>& q) { need(q[0] >= 2 && q[1] >= 1, "p >= 2, k >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("C2", {{-q[0], -q[0]}, {q[1]}})); },
                 [](const std::vector<int>& q) {
                     int p = q[0], k = q[1];
                     return SeriesCombination(zv({-p}) * zv({-p, k}) + zv({-p, k, -p}) + zv({-p, -(k + p)}));
                 }});
    c.push_back({"product-deficit-alt2", "product deficit, both entries alternating", "m,p >= 2, k >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, k >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("C2", {{-q[0], -q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], k = q[2];
                     return SeriesCombination(zv({-p}) * zv({-m, k}) + zv({-p, k, -m}) + zv({-p, -(m + k)}));
                 }});
    c.push_back({"product-deficit-alt1", "product deficit, second entry alternating", "m,p >= 2, k >= 1", 3,
                 [=](const std::vector<int>& q) { need(ge2({q[0], q[1]}) && q[2] >= 1, "m,p >= 2, k >= 1"); },
                 [](const std::vector<int>& q) { return SeriesCombination(spec("C2", {{q[0], -q[1]}, {q[2]}})); },
                 [](const std::vector<int>& q) {
                     int m = q[0], p = q[1], k = q[2];
                     return SeriesCombination(zv({-p}) * zv({m, k}) + zv({-p, k, m}) + zv({-p, m + k}));
                 }});
    return c;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& formula_catalog()
{
    static const std::vector<CatalogEntry> c = detail::build_catalog();
    return c;
}

inline const CatalogEntry& catalog_entry(const std::string& id)
{
    for (const auto& e : formula_catalog())
        if (e.id == id) return e;
    throw std::invalid_argument("unknown identity id " + id);
}

namespace detail {

inline const CatalogEntry& checked_entry(const std::string& id, const std::vector<int>& params)
{
    const auto& e = catalog_entry(id);
    if (params.size() != e.arity)
        throw std::invalid_argument(id + " takes " + std::to_string(e.arity) + " parameters");
    e.check(params);
    return e;
}

}  // namespace detail

/// Right-hand side of a catalog identity as a normalized combination. Entries
/// whose right side is itself a series have no closed form.
inline LinComb closed_form(const std::string& id, const std::vector<int>& params)
{
    const auto& e = detail::checked_entry(id, params);
    auto r = e.rhs(params);
    if (!r.series.empty()) throw std::invalid_argument(id + " has a series-valued right-hand side");
    return normalize(r.constants);
}

struct VerifyResult {
    Real lhs;
    Real rhs;
    Float gap = 0;
    bool pass = false;
    std::uint64_t terms_used = 0;
};

/// Evaluates both sides; pass iff |lhs - rhs| <= lhs.err + rhs.err + tol.
inline VerifyResult verify_formula(const std::string& id, const std::vector<int>& params, const PrecisionContext& ctx)
{
    const auto& e = detail::checked_entry(id, params);
    ctx.ensure_active();
    auto l = evaluate_combination(e.lhs(params), ctx);
    auto r = evaluate_combination(e.rhs(params), ctx);
    VerifyResult out;
    out.lhs = l.value;
    out.rhs = r.value;
    out.gap = abs(l.value.value() - r.value.value());
    out.pass = out.gap <= l.value.err() + r.value.err() + ctx.tol();
    out.terms_used = std::max(l.terms_used, r.terms_used);
    return out;
}

}  // namespace mzv
