#pragma once

#include "mzv/bernoulli.hpp"
#include "mzv/precision.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mzv {

/// Coefficient tables for one truncation order K at one precision.
///
/// em[i][j]:    x^{-j} coefficient of sum_{k>=x} k^{-i}              (i >= 2)
/// boole[i][j]: x^{-j} coefficient of (-1)^x sum_{k>=x} (-1)^k k^{-i} (i >= 1)
/// shift[i][j]: x^{-j} coefficient of (x+1)^{-i}
struct ExpansionKernel {
    int K = 0;
    std::vector<std::vector<Float>> em, boole, shift;

    explicit ExpansionKernel(int order) : K(order)
    {
        const auto n = static_cast<std::size_t>(K + 1);
        em.assign(n, std::vector<Float>(n, Float(0)));
        boole.assign(n, std::vector<Float>(n, Float(0)));
        shift.assign(n, std::vector<Float>(n, Float(0)));

        std::vector<Float> bf(n + 2), ef(n + 2);
        for (unsigned m = 0; m < n + 2; ++m) {
            bf[m] = to_float(bernoulli(m) / factorial_q(m));
            // e_m = (1 - 2^{m+1}) B_{m+1} / (m+1)!
            ef[m] = to_float((Rational(1) - Rational(BigInt(1) << (m + 1))) * bernoulli(m + 1) /
                             factorial_q(m + 1));
        }

        for (int i = 2; i <= K; ++i) {
            auto& row = em[static_cast<std::size_t>(i)];
            row[static_cast<std::size_t>(i - 1)] = Float(1) / (i - 1);
            row[static_cast<std::size_t>(i)] = Float(1) / 2;
            Float rising = i;  // (i)_{2r-1}
            for (int r = 1; i + 2 * r - 1 <= K; ++r) {
                row[static_cast<std::size_t>(i + 2 * r - 1)] = bf[static_cast<std::size_t>(2 * r)] * rising;
                rising *= Float(i + 2 * r - 1) * Float(i + 2 * r);
            }
        }
        for (int i = 1; i <= K; ++i) {
            auto& row = boole[static_cast<std::size_t>(i)];
            Float rising = 1;  // (i)_m
            for (int m = 0; i + m <= K; ++m) {
                Float c = ef[static_cast<std::size_t>(m)] * rising;
                row[static_cast<std::size_t>(i + m)] = (m & 1) ? Float(-c) : c;
                rising *= Float(i + m);
            }
        }
        // (x+1)^{-i} = sum_{j>=i} (-1)^{j-i} C(j-1, j-i) x^{-j}
        shift[0][0] = 1;
        for (int i = 1; i <= K; ++i) {
            Float binom = 1;
            for (int j = i; j <= K; ++j) {
                shift[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ((j - i) & 1) ? Float(-binom) : binom;
                binom = binom * Float(j) / Float(j - i + 1);
            }
        }
    }

    static std::shared_ptr<const ExpansionKernel> get(int order)
    {
        thread_local std::map<std::pair<int, unsigned>, std::shared_ptr<const ExpansionKernel>> cache;
        auto key = std::make_pair(order, Float::default_precision());
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        auto k = std::make_shared<const ExpansionKernel>(order);
        cache.emplace(key, k);
        return k;
    }
};

/// f(x) ~ sign^x * sum_{i=lead}^{valid} c[i] x^{-i} as x -> infinity.
/// `err[i]` bounds the accumulated rounding error of c[i].
struct Expansion {
    int sign = 1;
    int lead = 0;
    int valid = 0;
    std::vector<Float> c;
    std::vector<Float> err;

    static Expansion one(int K)
    {
        Expansion e;
        e.valid = K;
        e.c.assign(static_cast<std::size_t>(K + 1), Float(0));
        e.err.assign(static_cast<std::size_t>(K + 1), Float(0));
        e.c[0] = 1;
        return e;
    }

    int order() const { return static_cast<int>(c.size()) - 1; }
};

/// Multiply by sign^x x^{-a}.
inline Expansion times_power(const Expansion& e, int a, int sign)
{
    const int K = e.order();
    Expansion out;
    out.sign = e.sign * sign;
    out.lead = e.lead + a;
    out.valid = std::min(K, e.valid + a);
    out.c.assign(e.c.size(), Float(0));
    out.err.assign(e.c.size(), Float(0));
    for (int i = e.lead; i + a <= K && i <= e.valid; ++i) {
        out.c[static_cast<std::size_t>(i + a)] = e.c[static_cast<std::size_t>(i)];
        out.err[static_cast<std::size_t>(i + a)] = e.err[static_cast<std::size_t>(i)];
    }
    return out;
}

/// x -> f(x+1).
inline Expansion shifted(const Expansion& e, const ExpansionKernel& ker)
{
    Expansion out = e;
    const Float eps = unit_roundoff();
    for (int j = e.lead; j <= e.valid; ++j) {
        Float acc = 0, mag = 0, prop = 0;
        for (int i = e.lead; i <= j; ++i) {
            const Float& s = ker.shift[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            Float t = e.c[static_cast<std::size_t>(i)] * s;
            acc += t;
            mag += abs(t);
            prop += e.err[static_cast<std::size_t>(i)] * abs(s);
        }
        out.c[static_cast<std::size_t>(j)] = e.sign < 0 ? Float(-acc) : acc;
        out.err[static_cast<std::size_t>(j)] = prop + 2 * Float(j - e.lead + 1) * eps * mag;
    }
    for (int j = e.valid + 1; j <= e.order(); ++j) {
        out.c[static_cast<std::size_t>(j)] = 0;
        out.err[static_cast<std::size_t>(j)] = 0;
    }
    return out;
}

/// F(x) = sum_{k>=x} f(k). Non-alternating input needs lead >= 2 and loses one
/// order of validity; alternating input needs lead >= 1.
inline Expansion tail_sum(const Expansion& e, const ExpansionKernel& ker)
{
    const bool alt = e.sign < 0;
    if (!alt && e.lead < 2) throw DivergentSeries("tail sum of a term decaying no faster than 1/k");
    if (alt && e.lead < 1) throw DivergentSeries("tail sum of a non-decaying alternating term");
    const auto& table = alt ? ker.boole : ker.em;
    const int K = e.order();
    const Float eps = unit_roundoff();

    Expansion out;
    out.sign = e.sign;
    out.lead = alt ? e.lead : e.lead - 1;
    out.valid = alt ? e.valid : e.valid - 1;
    out.c.assign(e.c.size(), Float(0));
    out.err.assign(e.c.size(), Float(0));
    for (int j = out.lead; j <= std::min(out.valid, K); ++j) {
        Float acc = 0, mag = 0, prop = 0;
        for (int i = e.lead; i <= e.valid && i <= j + 1; ++i) {
            const Float& k = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (k == 0) continue;
            Float t = e.c[static_cast<std::size_t>(i)] * k;
            acc += t;
            mag += abs(t);
            prop += e.err[static_cast<std::size_t>(i)] * abs(k);
        }
        out.c[static_cast<std::size_t>(j)] = acc;
        out.err[static_cast<std::size_t>(j)] = prop + 2 * Float(j + 2) * eps * mag;
    }
    return out;
}

/// Value of the expansion at integer x >= 1. The error adds the two last
/// valid terms (truncation proxy) to the propagated coefficient errors.
inline Real evaluate(const Expansion& e, std::uint64_t x)
{
    const Float inv = Float(1) / Float(x);
    Float xp = pow(inv, e.lead);
    Float sum = 0, err = 0, mag = 0;
    Float last = 0, before_last = 0;
    for (int i = e.lead; i <= e.valid; ++i) {
        Float t = e.c[static_cast<std::size_t>(i)] * xp;
        sum += t;
        mag += abs(t);
        err += e.err[static_cast<std::size_t>(i)] * xp;
        before_last = last;
        last = abs(t);
        xp *= inv;
    }
    if (e.sign < 0 && (x & 1U)) sum = -sum;
    Float trunc = last + before_last;
    return Real(sum, err + trunc + Float(e.valid - e.lead + 4) * unit_roundoff() * mag);
}

/// One summation variable of a chain: sign^k k^{-exponent}.
struct ChainLink {
    int exponent = 0;
    int sign = 1;
};

/// Sum over x_1 R_1 x_2 R_2 ... x_m > N of prod sign_i^{x_i} x_i^{-exponent_i},
/// where R_i is '>' or '>=' (weak[i]). Links run from the largest variable down.
inline Real chain_tail(const std::vector<ChainLink>& links, const std::vector<bool>& weak, std::uint64_t N,
                       const PrecisionContext& ctx)
{
    if (links.empty()) return Real::exact(1);
    ctx.ensure_active();
    auto ker = ExpansionKernel::get(ctx.expansion_order());
    Expansion e = Expansion::one(ker->K);
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (i > 0 && !(i - 1 < weak.size() && weak[i - 1])) e = shifted(e, *ker);
        e = times_power(e, links[i].exponent, links[i].sign);
        e = tail_sum(e, *ker);
    }
    return evaluate(e, N + 1);
}

inline std::string chain_key(const std::vector<ChainLink>& links, const std::vector<bool>& weak)
{
    std::string k;
    for (std::size_t i = 0; i < links.size(); ++i) {
        k += std::to_string(links[i].sign * links[i].exponent);
        if (links[i].exponent == 0) k += links[i].sign < 0 ? "-" : "+";
        if (i + 1 < links.size()) k += (i < weak.size() && weak[i]) ? ">=" : ">";
    }
    return k;
}

}  // namespace mzv
