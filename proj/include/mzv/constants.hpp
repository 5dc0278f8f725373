#pragma once

#include "mzv/bernoulli.hpp"
#include "mzv/precision.hpp"

#include <boost/math/constants/constants.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace mzv {

/// Accuracy aimed for by constant evaluations; well below target_tol so that
/// constants never dominate an error budget.
inline Float working_tol(const PrecisionContext& ctx)
{
    return pow(Float(10), -static_cast<int>(ctx.working_digits) + 6);
}

namespace detail {

inline Float inv_pow(std::uint64_t k, int s) { return Float(1) / pow(Float(k), s); }

}  // namespace detail

/// zeta(s) - zeta_n(s) by Euler-Maclaurin: explicit terms up to n+M, then the
/// integral, boundary and Bernoulli corrections at x = n+M+1. The correction
/// series is cut adaptively; since x^{-s} is completely monotone the first
/// omitted correction bounds the remainder.
inline Real zeta_tail(int s, std::uint64_t n, const PrecisionContext& ctx, unsigned M = 50)
{
    if (s < 2) throw std::invalid_argument("zeta_tail requires s >= 2");
    ctx.ensure_active();
    Float sum = 0;
    for (std::uint64_t j = n + 1; j <= n + M; ++j) sum += detail::inv_pow(j, s);

    const Float x = Float(n + M + 1);
    const Float xs = detail::inv_pow(n + M + 1, s);
    Float tail = x * xs / (s - 1) + xs / 2;
    const Float floor = working_tol(ctx) * Float("1e-4");
    Float rising = s;  // (s)_{2r-1}
    Float xpow = xs / x;  // x^{-s-2r+1}
    Float bound = 0;
    Float prev = -1;
    unsigned r = 1;
    for (;; ++r) {
        Float term = to_float(bernoulli(2 * r) / factorial_q(2 * r)) * rising * xpow;
        Float mag = abs(term);
        if (mag <= floor || (prev >= 0 && mag > prev) || r > 400) {
            bound = mag;
            break;
        }
        tail += term;
        prev = mag;
        rising *= Float(s + 2 * r - 1) * Float(s + 2 * r);
        xpow /= x * x;
    }
    Float value = sum + tail;
    Float rounding = Float(M + r + 8) * unit_roundoff() * abs(value);
    return Real(value, bound + rounding);
}

inline Real zeta_value(int s, const PrecisionContext& ctx)
{
    if (s < 2) throw std::invalid_argument("zeta_value requires s >= 2");
    return zeta_tail(s, 0, ctx);
}

/// Sum_{j>n} (-1)^{j-1} j^{-s}: explicit terms up to n+M, then Boole
/// summation at x = n+M+1 with twice the first omitted term as bound.
inline Real alt_zeta_tail(int s, std::uint64_t n, const PrecisionContext& ctx, unsigned M = 50)
{
    if (s < 1) throw std::invalid_argument("alt_zeta_tail requires s >= 1");
    ctx.ensure_active();
    Float sum = 0;
    for (std::uint64_t j = n + 1; j <= n + M; ++j) {
        Float t = detail::inv_pow(j, s);
        sum += (j & 1U) ? t : Float(-t);
    }
    const std::uint64_t X = n + M + 1;
    const Float x = Float(X);
    // sum_{k>=X} (-1)^k k^{-s} = (-1)^X sum_i e_i (-1)^i (s)_i x^{-s-i}
    Float boole = 0;
    const Float floor = working_tol(ctx) * Float("1e-4");
    Float rising = 1;  // (s)_i
    Float xpow = detail::inv_pow(X, s);
    Float bound = 0;
    Float prev = -1;
    unsigned i = 0;
    for (;; ++i) {
        Rational e = (Rational(1) - Rational(BigInt(1) << (i + 1))) * bernoulli(i + 1) / factorial_q(i + 1);
        if (e != 0) {
            Float term = to_float(e) * rising * xpow;
            if (i & 1U) term = -term;
            Float mag = abs(term);
            if (mag <= floor || (prev >= 0 && mag > prev) || i > 800) {
                bound = 2 * mag;
                break;
            }
            boole += term;
            prev = mag;
        }
        rising *= Float(s + static_cast<int>(i));
        xpow /= x;
    }
    // (-1)^{k-1} = -(-1)^k
    Float far = (X & 1U) ? boole : Float(-boole);
    Float value = sum + far;
    Float rounding = Float(M + i + 8) * unit_roundoff() * (abs(sum) + abs(far) + abs(value));
    return Real(value, bound + rounding);
}

inline Real polylog(int p, const Rational& x, const PrecisionContext& ctx);

inline Real ln2(const PrecisionContext& ctx) { return polylog(1, Rational(1, 2), ctx); }

inline Real pi_value(const PrecisionContext& ctx)
{
    ctx.ensure_active();
    Float v = boost::math::constants::pi<Float>();
    return Real(v, 4 * unit_roundoff() * v);
}

/// Alternating zeta: (1 - 2^{1-s}) zeta(s), and ln 2 at s = 1.
inline Real alt_zeta_value(int s, const PrecisionContext& ctx)
{
    if (s < 1) throw std::invalid_argument("alt_zeta_value requires s >= 1");
    if (s == 1) return ln2(ctx);
    Rational factor = Rational(1) - Rational(BigInt(1), BigInt(1) << (s - 1));
    return factor * zeta_value(s, ctx);
}

/// Li_p(x) for |x| <= 1, (p, x) != (1, 1).
inline Real polylog(int p, const Rational& x, const PrecisionContext& ctx)
{
    if (p < 1) throw std::invalid_argument("polylog requires p >= 1");
    if (abs(x) > 1) throw std::invalid_argument("polylog requires |x| <= 1");
    if (p == 1 && x == 1) throw DivergentSeries("Li_1(1) diverges");
    ctx.ensure_active();
    if (x == 0) return Real::exact(0);
    if (x == 1) return zeta_value(p, ctx);
    if (x == -1) return -alt_zeta_value(p, ctx);

    const Float xf = to_float(x);
    const Float ax = abs(xf);
    const Float floor = working_tol(ctx) * Float("1e-4");
    Float sum = 0;
    Float xpow = 1;
    std::uint64_t n = 1;
    Float bound;
    for (;; ++n) {
        xpow *= xf;
        sum += xpow * detail::inv_pow(n, p);
        // |sum_{k>n} x^k/k^p| <= |x|^{n+1} / ((n+1)^p (1-|x|))
        bound = abs(xpow) * ax * detail::inv_pow(n + 1, p) / (1 - ax);
        if (bound <= floor) break;
    }
    return Real(sum, bound + Float(n + 4) * unit_roundoff() * abs(sum));
}

/// A closed-form constant appearing in right-hand sides.
struct ConstantAtom {
    enum class Kind { Zeta, Ln2, Pi, Polylog, Named };

    Kind kind = Kind::Ln2;
    int s = 0;          // Zeta argument, Polylog order
    Rational x = 0;     // Polylog argument
    std::string label;  // Named

    static ConstantAtom zeta(int s)
    {
        if (s < 2) throw std::invalid_argument("zeta atom requires s >= 2");
        ConstantAtom a;
        a.kind = Kind::Zeta;
        a.s = s;
        return a;
    }
    static ConstantAtom log2() { return ConstantAtom{}; }
    static ConstantAtom pi()
    {
        ConstantAtom a;
        a.kind = Kind::Pi;
        return a;
    }
    static ConstantAtom polylog(int p, Rational x)
    {
        if (p < 1 || abs(x) > 1) throw std::invalid_argument("polylog atom requires p >= 1 and |x| <= 1");
        if (p == 1 && x == 1) throw std::invalid_argument("Li_1(1) diverges");
        ConstantAtom a;
        a.kind = Kind::Polylog;
        a.s = p;
        a.x = std::move(x);
        return a;
    }
    static ConstantAtom named(std::string label)
    {
        ConstantAtom a;
        a.kind = Kind::Named;
        a.label = std::move(label);
        return a;
    }

    std::string text() const
    {
        switch (kind) {
        case Kind::Zeta: return "z(" + std::to_string(s) + ")";
        case Kind::Ln2: return "ln2";
        case Kind::Pi: return "pi";
        case Kind::Polylog: return "Li(" + std::to_string(s) + "," + x.str() + ")";
        case Kind::Named: return "const(" + label + ")";
        }
        return {};
    }

    friend bool operator==(const ConstantAtom& a, const ConstantAtom& b) { return a.text() == b.text(); }
};

/// Values of atoms other than Named.
inline Real basic_constant_value(const ConstantAtom& a, const PrecisionContext& ctx)
{
    switch (a.kind) {
    case ConstantAtom::Kind::Zeta: return zeta_value(a.s, ctx);
    case ConstantAtom::Kind::Ln2: return ln2(ctx);
    case ConstantAtom::Kind::Pi: return pi_value(ctx);
    case ConstantAtom::Kind::Polylog: return polylog(a.s, a.x, ctx);
    case ConstantAtom::Kind::Named: break;
    }
    throw std::invalid_argument("named constant needs a provider: " + a.text());
}

/// Write-once cache of constant values keyed by text and precision.
class ConstantCache {
  public:
    static ConstantCache& instance()
    {
        static ConstantCache cache;
        return cache;
    }

    Real get(const std::string& key, const PrecisionContext& ctx, const std::function<Real()>& compute)
    {
        std::string full = key + "@" + std::to_string(ctx.working_digits);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = values_.find(full);
            if (it != values_.end()) return it->second;
        }
        Real v = compute();
        std::lock_guard<std::mutex> lock(mu_);
        return values_.emplace(full, v).first->second;
    }

    void clear()
    {
        std::lock_guard<std::mutex> lock(mu_);
        values_.clear();
    }

  private:
    std::mutex mu_;
    std::map<std::string, Real> values_;
};

}  // namespace mzv
