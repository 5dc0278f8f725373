#pragma once

#include "mzv/mzv_eval.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mzv {

/// Per-n factor of a series term.
///   Partial:      zeta_n(s)            (n >= k_1)
///   PartialBelow: zeta_{n-1}(s)        (n >  k_1)
///   Tail:         zeta(s) - zeta_n(s)  (k_1 >  n)
struct SeriesFactor {
    enum class Kind { Partial, PartialBelow, Tail };
    Kind kind = Kind::Partial;
    SignedIndex index;

    std::string key() const
    {
        const char* k = kind == Kind::Partial ? "P" : kind == Kind::PartialBelow ? "B" : "T";
        return k + canonical_text(index);
    }
};

/// coeff * sum_{n>=1} n_sign^n n^{-n_exponent} prod factors(n).
struct SeriesMonomial {
    Real coeff = Real::exact(1);
    int n_exponent = 0;
    int n_sign = 1;
    std::vector<SeriesFactor> factors;
};

/// constant + sum of monomials.
struct SeriesPlan {
    Real constant = Real::exact(0);
    std::vector<SeriesMonomial> monomials;

    SeriesPlan& add(SeriesMonomial m)
    {
        monomials.push_back(std::move(m));
        return *this;
    }
    SeriesPlan& operator+=(const SeriesPlan& o)
    {
        constant += o.constant;
        monomials.insert(monomials.end(), o.monomials.begin(), o.monomials.end());
        return *this;
    }
    SeriesPlan scaled(const Real& c) const
    {
        SeriesPlan out;
        out.constant = c * constant;
        for (auto m : monomials) {
            m.coeff = c * m.coeff;
            out.monomials.push_back(std::move(m));
        }
        return out;
    }
};

struct SeriesValue {
    Real value;
    std::uint64_t terms_used = 0;
};

namespace detail {

inline SeriesFactor partial(SignedIndex s) { return {SeriesFactor::Kind::Partial, std::move(s)}; }
inline SeriesFactor partial_below(SignedIndex s) { return {SeriesFactor::Kind::PartialBelow, std::move(s)}; }
inline SeriesFactor tail(SignedIndex s) { return {SeriesFactor::Kind::Tail, std::move(s)}; }

/// Values of zeta_n(idx) for n = 0..N with rounding bounds.
inline std::vector<Real> partial_table(const SignedIndex& idx, std::uint64_t N)
{
    auto val = mhs_values<Float>(idx, N);
    std::vector<int> abs_entries;
    for (int e : idx.entries()) abs_entries.push_back(std::abs(e));
    auto mag = mhs_values<Float>(SignedIndex(abs_entries, idx.star()), N);
    std::vector<Real> out;
    out.reserve(N + 1);
    for (std::uint64_t n = 0; n <= N; ++n)
        out.emplace_back(val[n], 2 * Float(n + 1) * Float(idx.depth() + 1) * unit_roundoff() * mag[n]);
    return out;
}

/// zeta(idx) - zeta_n(idx) for n = 0..N: the value at N from chain tails,
/// then backwards by T_{n-1} = T_n + sgn(s_1)^n n^{-|s_1|} zeta_{n-1 or n}(rest).
inline std::vector<Real> tail_table(const SignedIndex& idx, std::uint64_t N, const PrecisionContext& ctx)
{
    if (idx.empty()) throw std::invalid_argument("tail of the empty index");
    if (!is_admissible(idx)) throw DivergentSeries("tail of inadmissible index " + canonical_text(idx));
    const std::vector<bool> weak(static_cast<std::size_t>(idx.depth()), idx.star());
    auto partials = suffix_partials(idx, N);
    Real tN = Real::exact(0);
    for (int j = 1; j <= idx.depth(); ++j)
        tN += cached_chain_tail(chain_links(idx, 0, static_cast<std::size_t>(j)), weak, N, ctx) *
              partials[static_cast<std::size_t>(j)];
    auto rest = partial_table(idx.suffix(1), N);
    std::vector<Real> out(N + 1);
    out[N] = tN;
    const int s1 = idx[0];
    for (std::uint64_t n = N; n >= 1; --n) {
        Float t = index_term<Float>(s1, n);
        out[n - 1] = out[n] + Real(t) * (idx.star() ? rest[n] : rest[n - 1]);
    }
    return out;
}

struct Relation {
    int upper, lower;
    bool strict;
};

struct TailRegion {
    std::vector<ChainLink> vars;
    std::vector<Relation> rels;
    Real multiplier = Real::exact(1);
};

/// Sums the chain over every weak order of the variables compatible with the
/// relations; each weak order is a strictly decreasing chain of merged blocks.
inline Real sum_weak_orders(const TailRegion& region, std::uint64_t N, const PrecisionContext& ctx)
{
    const int V = static_cast<int>(region.vars.size());
    const unsigned full = (1U << V) - 1;
    Real total = Real::exact(0);
    std::vector<ChainLink> chain;
    std::function<void(unsigned)> rec = [&](unsigned remaining) {
        if (remaining == 0) {
            total += cached_chain_tail(chain, {}, N, ctx);
            return;
        }
        for (unsigned B = remaining; B; B = (B - 1) & remaining) {
            bool ok = true;
            for (const auto& r : region.rels) {
                if (!(B & (1U << r.lower))) continue;
                unsigned above = r.strict ? remaining : (remaining & ~B);
                if (above & (1U << r.upper)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            ChainLink block{0, 1};
            for (int v = 0; v < V; ++v)
                if (B & (1U << v)) {
                    block.exponent += region.vars[static_cast<std::size_t>(v)].exponent;
                    block.sign *= region.vars[static_cast<std::size_t>(v)].sign;
                }
            chain.push_back(block);
            rec(remaining & ~B);
            chain.pop_back();
        }
    };
    rec(full);
    return region.multiplier * total;
}

/// sum_{n>N} of one monomial: split every factor by how many of its
/// variables exceed N, the rest collapsing to constants zeta_N(suffix).
inline Real monomial_tail(const SeriesMonomial& m, std::uint64_t N, const PrecisionContext& ctx,
                          std::map<std::string, std::vector<Real>>& suffix_cache)
{
    auto suffix_at_N = [&](const SignedIndex& idx, int j) -> const Real& {
        auto key = canonical_text(idx);
        auto it = suffix_cache.find(key);
        if (it == suffix_cache.end()) it = suffix_cache.emplace(key, suffix_partials(idx, N)).first;
        return it->second[static_cast<std::size_t>(j)];
    };

    Real total = Real::exact(0);
    std::function<void(std::size_t, TailRegion&)> rec = [&](std::size_t fi, TailRegion& region) {
        if (fi == m.factors.size()) {
            total += sum_weak_orders(region, N, ctx);
            return;
        }
        const auto& f = m.factors[fi];
        const int depth = f.index.depth();
        const bool is_tail = f.kind == SeriesFactor::Kind::Tail;
        for (int j = is_tail ? 1 : 0; j <= depth; ++j) {
            TailRegion next = region;
            int first = static_cast<int>(next.vars.size());
            for (int i = 0; i < j; ++i) {
                int e = f.index[static_cast<std::size_t>(i)];
                next.vars.push_back({std::abs(e), e < 0 ? -1 : 1});
                if (i > 0) next.rels.push_back({first + i - 1, first + i, !f.index.star()});
            }
            if (j > 0) {
                if (is_tail)
                    next.rels.push_back({first, 0, true});
                else
                    next.rels.push_back({0, first, f.kind == SeriesFactor::Kind::PartialBelow});
            }
            next.multiplier = next.multiplier * suffix_at_N(f.index, j);
            rec(fi + 1, next);
        }
    };
    TailRegion root;
    root.vars.push_back({m.n_exponent, m.n_sign});
    rec(0, root);
    return m.coeff * total;
}

}  // namespace detail

/// Sums every monomial: n <= N directly, n > N through chain tails. All
/// tails are computed without subtracting partial sums from limits.
inline SeriesValue evaluate_series(const SeriesPlan& plan, const PrecisionContext& ctx)
{
    ctx.ensure_active();
    const Float tol = ctx.tol();
    std::uint64_t N = ctx.head_terms();
    for (;;) {
        std::map<std::string, std::vector<Real>> tables, suffix_cache;
        auto table = [&](const SeriesFactor& f) -> const std::vector<Real>& {
            auto key = f.key();
            auto it = tables.find(key);
            if (it != tables.end()) return it->second;
            std::vector<Real> t;
            if (f.kind == SeriesFactor::Kind::Tail) {
                t = detail::tail_table(f.index, N, ctx);
            } else {
                t = detail::partial_table(f.index, N);
                if (f.kind == SeriesFactor::Kind::PartialBelow) {
                    t.insert(t.begin(), Real::exact(0));
                    t.pop_back();
                }
            }
            return tables.emplace(key, std::move(t)).first->second;
        };

        Real total = plan.constant;
        for (const auto& m : plan.monomials) {
            Real head = Real::exact(0);
            for (std::uint64_t n = 1; n <= N; ++n) {
                Real term(signed_power_term<Float>(m.n_sign, m.n_exponent, n));
                for (const auto& f : m.factors) term *= table(f)[n];
                head += term;
            }
            total += m.coeff * head;
            total += detail::monomial_tail(m, N, ctx, suffix_cache);
        }
        if (total.err() <= tol) return {total, N};
        if (N * 2 > ctx.max_n)
            throw ToleranceNotMet("series tolerance not met", total.err().convert_to<double>());
        N *= 2;
    }
}

}  // namespace mzv
