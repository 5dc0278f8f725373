// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "mzv/mzv.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace mzv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::vector<IdentityRecord> bundled_corpus()
{
    std::ifstream in(MZV_CORPUS_DIR "/identities.mzv");
    std::stringstream s;
    s << in.rdbuf();
    return parse_corpus(s.str());
}

std::vector<IdentityRecord> select(const std::vector<IdentityRecord>& all, const std::string& prefix,
                                   bool include_corrected = false)
{
    std::vector<IdentityRecord> out;
    for (const auto& r : all) {
        bool corrected = r.id.find("-corrected") != std::string::npos;
        if (r.id.rfind(prefix, 0) == 0 && corrected == include_corrected) out.push_back(r);
    }
    return out;
}

PrecisionContext context(double tol)
{
    PrecisionContext c{40, tol, std::uint64_t{1} << 24};
    c.activate();
    return c;
}

// every record must pass with gap <= tol, each within the time limit
Outcome run_records(const std::vector<IdentityRecord>& recs, double tol, double seconds_each, std::size_t expected)
{
    Outcome o;
    auto ctx = context(tol);
    std::vector<std::string> bad;
    double slowest = 0;
    for (const auto& r : recs) {
        auto t0 = Clock::now();
        auto res = verify_record(r, ctx);
        double dt = seconds_since(t0);
        slowest = std::max(slowest, dt);
        if (!res.pass || res.gap > Float(tol) || dt > seconds_each) bad.push_back(r.id);
    }
    std::ostringstream d;
    d << recs.size() - bad.size() << "/" << recs.size() << " verified, slowest " << std::fixed
      << std::setprecision(2) << slowest << " s";
    if (recs.size() != expected) {
        o.pass = false;
        d << "; expected " << expected << " records";
    }
    if (!bad.empty()) {
        o.pass = false;
        d << "; failing:";
        for (const auto& b : bad) d << " " << b;
    }
    o.detail = d.str();
    return o;
}

Outcome criterion1(const std::vector<IdentityRecord>& all)
{
    auto o = run_records(select(all, "ex4-"), 1e-8, 10.0, 17);
    // the printed forms of items 10 and 15 disagree with the series; the
    // corrected companions are reported for reference only
    auto fixes = run_records(select(all, "ex4-", true), 1e-8, 10.0, 3);
    o.detail += " (corrected forms: " + fixes.detail + ")";
    return o;
}

Outcome criterion2(const std::vector<IdentityRecord>& all) { return run_records(select(all, "lin-"), 1e-8, 60.0, 8); }

Outcome criterion3(const std::vector<IdentityRecord>& all) { return run_records(select(all, "quad-"), 1e-7, 60.0, 6); }

Rational random_rational(std::mt19937& rng)
{
    std::uniform_int_distribution<int> n(-20, 20), d(1, 20);
    return Rational(n(rng), d(rng));
}

Outcome criterion4()
{
    auto t0 = Clock::now();
    std::mt19937 rng(20240601);
    std::uniform_int_distribution<std::size_t> len(1, 100);
    std::size_t nonzero = 0;
    const int instances = 1000;
    for (int t = 0; t < instances; ++t) {
        std::size_t n = len(rng);
        std::vector<Rational> a(n), b(n);
        for (auto& v : a) v = random_rational(rng);
        for (auto& v : b) v = random_rational(rng);
        int den = std::uniform_int_distribution<int>(1, 12)(rng);
        Rational x(std::uniform_int_distribution<int>(-den, den)(rng), den);
        if (abel_residual(a, b, x, random_rational(rng), random_rational(rng)) != 0) ++nonzero;
        if (finite_symmetry_residual(a, b) != 0) ++nonzero;
    }
    double dt = seconds_since(t0);
    std::ostringstream d;
    d << 2 * instances << " residuals, " << nonzero << " nonzero, " << std::fixed << std::setprecision(2) << dt
      << " s";
    return {nonzero == 0 && dt < 5.0, d.str()};
}

SignedIndex random_admissible(std::mt19937& rng, int max_weight)
{
    std::uniform_int_distribution<int> depth(1, 3), coin(0, 1);
    for (;;) {
        std::vector<int> e(static_cast<std::size_t>(depth(rng)));
        int w = 0;
        for (int& v : e) {
            v = std::uniform_int_distribution<int>(1, 4)(rng);
            w += v;
            if (coin(rng)) v = -v;
        }
        if (w <= max_weight && e[0] != 1) return SignedIndex(e);
    }
}

Outcome criterion5()
{
    auto ctx = context(1e-12);
    std::mt19937 rng(77);
    int bad = 0;
    const int pairs = 60;
    Float worst = 0;
    for (int t = 0; t < pairs; ++t) {
        auto u = random_admissible(rng, 7);
        auto v = random_admissible(rng, 9 - u.weight());
        auto lhs = lincomb_numeric(stuffle(u, v), ctx);
        auto rhs = mzv_numeric(u, ctx).value * mzv_numeric(v, ctx).value;
        Float gap = abs(lhs.value() - rhs.value());
        worst = std::max(worst, gap);
        if (gap > lhs.err() + rhs.err()) ++bad;
    }
    std::ostringstream d;
    d << pairs - bad << "/" << pairs << " pairs within combined error, max gap " << to_scientific(worst, 2);
    return {bad == 0, d.str()};
}

// all signed compositions with depth <= max_depth and weight <= max_weight
std::vector<std::vector<int>> signed_compositions(int max_depth, int max_weight)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int left) {
        if (!cur.empty()) out.push_back(cur);
        if (static_cast<int>(cur.size()) == max_depth) return;
        for (int a = 1; a <= left; ++a)
            for (int s : {1, -1}) {
                cur.push_back(s * a);
                rec(left - a);
                cur.pop_back();
            }
    };
    rec(max_weight);
    return out;
}

std::vector<SignedIndex> contractions(const std::vector<int>& e)
{
    std::vector<SignedIndex> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << (e.size() - 1)); ++mask) {
        std::vector<int> w{e[0]};
        for (std::size_t i = 1; i < e.size(); ++i) {
            if (mask >> (i - 1) & 1U) {
                int sign = ((w.back() < 0) != (e[i] < 0)) ? -1 : 1;
                w.back() = sign * (std::abs(w.back()) + std::abs(e[i]));
            } else {
                w.push_back(e[i]);
            }
        }
        out.emplace_back(w);
    }
    return out;
}

Outcome criterion6()
{
    auto ctx = context(1e-10);
    std::size_t indices = 0, finite_bad = 0, infinite = 0, infinite_bad = 0;
    for (const auto& e : signed_compositions(3, 8)) {
        SignedIndex star(e, true);
        ++indices;
        auto lhs = mhs_stream(star, 50);
        std::vector<PartialSumTable> parts;
        for (const auto& c : contractions(e)) parts.push_back(mhs_stream(c, 50));
        for (std::uint64_t n = 0; n <= 50; ++n) {
            Rational s = 0;
            for (const auto& p : parts) s += p[n];
            if (s != lhs[n]) {
                ++finite_bad;
                break;
            }
        }
        if (!is_admissible(star)) continue;
        ++infinite;
        auto direct = mzv_numeric(star, ctx).value;
        auto expanded = lincomb_numeric(star_expand(star), ctx);
        if (abs(direct.value() - expanded.value()) > direct.err() + expanded.err() + ctx.tol()) ++infinite_bad;
    }
    std::ostringstream d;
    d << indices << " star indices exact for n <= 50 (" << finite_bad << " bad); " << infinite - infinite_bad << "/"
      << infinite << " admissible ones match their expansion numerically";
    return {finite_bad == 0 && infinite_bad == 0, d.str()};
}

// nested summation in long double to N with a bound on everything beyond N
struct BruteValue {
    long double value;
    long double bound;
};

BruteValue brute_force(const std::vector<int>& e, bool star, long N)
{
    std::vector<long double> inner(static_cast<std::size_t>(N) + 1, 1.0L), next(inner.size());
    for (int j = static_cast<int>(e.size()) - 1; j >= 0; --j) {
        const int s = e[static_cast<std::size_t>(j)];
        long double acc = 0;
        next[0] = 0;
        for (long k = 1; k <= N; ++k) {
            const long double inv = 1.0L / static_cast<long double>(k);
            long double t = inv;
            for (int i = 1; i < std::abs(s); ++i) t *= inv;
            if (s < 0 && (k & 1)) t = -t;
            acc += t * inner[static_cast<std::size_t>(star ? k : k - 1)];
            next[static_cast<std::size_t>(k)] = acc;
        }
        inner.swap(next);
    }
    const int q = static_cast<int>(e.size()) - 1;  // inner sums are bounded by (1 + ln k)^q
    const long double L = logl(static_cast<long double>(N));
    long double tail;
    if (std::abs(e[0]) >= 2) {
        // int_N^inf (1 + ln x)^q x^{-s} dx
        const long double a = std::abs(e[0]) - 1;
        long double s = 0, f = 1;
        for (int i = 0; i <= q; ++i) {
            s += f * powl(1 + L, q - i) / powl(a, i + 1);
            f *= q - i;
        }
        tail = expl(-a * L) * s;
    } else {
        // alternating outer sum with slowly varying coefficients
        tail = 3 * powl(2 + L, q) / static_cast<long double>(N);
    }
    long double rounding = static_cast<long double>(N) * static_cast<long double>(e.size()) * 4 *
                           std::numeric_limits<long double>::epsilon() * powl(1 + L, q + 1);
    return {inner[static_cast<std::size_t>(N)], tail + rounding};
}

Outcome criterion7()
{
    auto ctx = context(1e-12);
    const long N = 1000000;
    std::size_t total = 0, bad = 0;
    long double worst_ratio = 0;
    for (const auto& e : signed_compositions(3, 6))
        for (bool star : {false, true}) {
            SignedIndex idx(e, star);
            if (!is_admissible(idx)) continue;
            ++total;
            auto want = brute_force(e, star, N);
            auto got = mzv_numeric(idx, ctx).value;
            long double gap = fabsl(static_cast<long double>(got.value()) - want.value);
            long double budget = want.bound + static_cast<long double>(got.err());
            worst_ratio = std::max(worst_ratio, gap / budget);
            if (gap > budget) {
                ++bad;
                std::cerr << "  criterion 7 mismatch " << canonical_text(idx) << "\n";
            }
        }
    std::ostringstream d;
    d << total - bad << "/" << total << " admissible indices agree with nested summation to N = " << N
      << ", worst gap/budget " << std::fixed << std::setprecision(6) << static_cast<double>(worst_ratio);
    return {bad == 0, d.str()};
}

Outcome criterion8()
{
    auto ctx = context(1e-10);
    std::size_t total = 0;
    std::vector<std::string> bad;
    auto check = [&](const std::string& id, std::vector<int> p) {
        ++total;
        bool ok = false;
        try {
            ok = verify_formula(id, p, ctx).pass;
        } catch (const std::exception&) {
        }
        if (!ok) {
            std::string s = id + "(";
            for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
            bad.push_back(s + ")");
        }
    };
    const std::vector<int> g234{2, 3, 4}, g23{2, 3};
    for (int m : g234)
        for (int p : g234) {
            check("F-quad", {m, p});
            check("mixed-linear", {m, p});
        }
    for (int m : g23)
        for (int p : g23)
            for (int r : g23) {
                check("F-cubic", {m, p, r});
                check("F-cubic-star", {m, p, r});
                auto a = lincomb_numeric(closed_form("F-cubic", {m, p, r}), ctx);
                auto b = lincomb_numeric(closed_form("F-cubic-star", {m, p, r}), ctx);
                ++total;
                if (abs(a.value() - b.value()) > a.err() + b.err() + ctx.tol()) bad.push_back("cubic forms differ");
            }
    for (int m : g234)
        for (int p : g234)
            for (int k : g234) {
                check("sym-triple", {m, p, k});
                check("mixed-tail", {m, p, k});
                check("product-deficit", {m, p, k});
                check("triple-deficit", {m, p, 2, k});
                check("triple-mixed", {m, p, 2, k});
            }
    std::ostringstream d;
    d << total - bad.size() << "/" << total << " grid points pass";
    for (const auto& b : bad) d << " " << b;
    return {bad.empty(), d.str()};
}

// adds 1/1000 to the leading coefficient of the first right-hand term
Expr perturb(Expr e)
{
    Expr* target = &e;
    if (target->kind == Expr::Kind::Sum) target = &target->children[0];
    if (target->kind == Expr::Kind::Number) {
        target->number += Rational(1, 1000);
    } else if (target->kind == Expr::Kind::Product && target->children[0].kind == Expr::Kind::Number) {
        target->children[0].number += Rational(1, 1000);
    } else {
        Expr p;
        p.kind = Expr::Kind::Product;
        p.children = {Expr::num(Rational(1001, 1000)), *target};
        *target = p;
    }
    return e;
}

Outcome criterion9(const std::vector<IdentityRecord>& all)
{
    auto ctx = context(1e-10);
    std::vector<IdentityRecord> good;
    for (const auto& r : all)
        if (r.id != "ex4-10" && r.id != "ex4-15a" && r.id != "ex4-15b") good.push_back(r);
    auto base = verify_corpus(good, ctx, 2);
    if (!base.all_passed()) return {false, "unperturbed corpus does not pass"};
    std::size_t ok = 0;
    std::vector<std::string> bad;
    Float smallest_gap = -1;
    const std::vector<std::string> targets{"lin-01", "quad-01", "quad-06", "ex4-01", "ex4-12", "alt-03"};
    for (const auto& id : targets) {
        auto recs = good;
        for (auto& r : recs)
            if (r.id == id) r.rhs = perturb(r.rhs);
        auto rep = verify_corpus(recs, ctx, 2);
        bool exact = rep.failed == 1;
        for (const auto& r : rep.results) {
            if (r.id != id) continue;
            exact = exact && !r.pass && r.gap > 1000 * ctx.tol();
            if (smallest_gap < 0 || r.gap < smallest_gap) smallest_gap = r.gap;
        }
        if (exact)
            ++ok;
        else
            bad.push_back(id);
    }
    std::ostringstream d;
    d << ok << "/" << targets.size() << " perturbed records fail alone, smallest gap " << to_scientific(smallest_gap, 2);
    for (const auto& b : bad) d << " " << b;
    return {bad.empty(), d.str()};
}

}  // namespace

int main()
{
    auto all = bundled_corpus();
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, [&] { return criterion1(all); }}, {2, [&] { return criterion2(all); }},
        {3, [&] { return criterion3(all); }}, {4, criterion4},
        {5, criterion5},                      {6, criterion6},
        {7, criterion7},                      {8, criterion8},
        {9, [&] { return criterion9(all); }},
    };
    bool all_pass = true;
    for (const auto& [n, run] : criteria) {
        Outcome o;
        auto t0 = Clock::now();
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all_pass = all_pass && o.pass;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << std::fixed
                  << std::setprecision(1) << seconds_since(t0) << " s]" << std::endl;
    }
    return all_pass ? 0 : 1;
}
