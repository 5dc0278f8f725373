#pragma once

#include "mzv/asymptotic.hpp"
#include "mzv/constants.hpp"
#include "mzv/harmonic_sums.hpp"
#include "mzv/stuffle.hpp"

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mzv {

struct EvalResult {
    Real value;
    std::uint64_t terms_used = 0;
    Float tail_estimate = 0;
};

/// Chain tails are pure functions of (chain, N, order, precision); shared
/// across threads behind a mutex.
inline Real cached_chain_tail(const std::vector<ChainLink>& links, const std::vector<bool>& weak, std::uint64_t N,
                              const PrecisionContext& ctx)
{
    static std::mutex mu;
    static std::map<std::string, Real> cache;
    std::string key = chain_key(links, weak) + "|" + std::to_string(N) + "|" +
                      std::to_string(ctx.expansion_order()) + "|" + std::to_string(ctx.working_digits);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Real v = chain_tail(links, weak, N, ctx);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, v).first->second;
}

inline std::vector<ChainLink> chain_links(const SignedIndex& idx, std::size_t first, std::size_t count)
{
    std::vector<ChainLink> links;
    for (std::size_t i = first; i < first + count; ++i) {
        int e = idx[i];
        links.push_back({std::abs(e), e < 0 ? -1 : 1});
    }
    return links;
}

/// zeta_N of every suffix (s_{j+1}, ..., s_m), j = 0..m, with rounding bounds.
inline std::vector<Real> suffix_partials(const SignedIndex& idx, std::uint64_t N)
{
    const int m = idx.depth();
    std::vector<Float> val(static_cast<std::size_t>(m + 1)), mag(static_cast<std::size_t>(m + 1));
    detail::suffix_levels<Float>(idx, N, [&](int j, const std::vector<Float>& level) {
        val[static_cast<std::size_t>(j)] = level[N];
    });
    std::vector<int> abs_entries;
    for (int e : idx.entries()) abs_entries.push_back(std::abs(e));
    detail::suffix_levels<Float>(SignedIndex(abs_entries, idx.star()), N, [&](int j, const std::vector<Float>& level) {
        mag[static_cast<std::size_t>(j)] = level[N];
    });
    std::vector<Real> out;
    for (int j = 0; j <= m; ++j) {
        Float rounding = 2 * Float(N) * Float(m - j + 1) * unit_roundoff() * mag[static_cast<std::size_t>(j)];
        out.emplace_back(val[static_cast<std::size_t>(j)], rounding);
    }
    return out;
}

/// zeta(idx) = zeta_N(idx) + sum_j [sum over s_1..s_j with the j-th variable
/// above N] * zeta_N(s_{j+1}, ..., s_m); each bracket is a chain tail
/// evaluated from its asymptotic expansion. N doubles until the error bound
/// meets the tolerance.
inline EvalResult mzv_numeric(const SignedIndex& idx, const PrecisionContext& ctx)
{
    if (!is_admissible(idx)) throw std::invalid_argument("inadmissible index " + canonical_text(idx));
    ctx.ensure_active();
    if (idx.empty()) return {Real::exact(1), 0, Float(0)};
    const Float tol = ctx.tol();
    std::uint64_t N = ctx.head_terms();
    const std::vector<bool> weak(static_cast<std::size_t>(idx.depth()), idx.star());
    for (;;) {
        auto partials = suffix_partials(idx, N);
        Real total = partials[0];
        Float tail_est = 0;
        for (int j = 1; j <= idx.depth(); ++j) {
            Real ct = cached_chain_tail(chain_links(idx, 0, static_cast<std::size_t>(j)), weak, N, ctx);
            tail_est += ct.err() * abs(partials[static_cast<std::size_t>(j)].value());
            total += ct * partials[static_cast<std::size_t>(j)];
        }
        if (total.err() <= tol) return {total, N, tail_est};
        if (N * 2 > ctx.max_n)
            throw ToleranceNotMet("tolerance not met for " + canonical_text(idx), total.err().convert_to<double>());
        N *= 2;
    }
}

/// Labels usable as const(label): "zs62" is zeta*(6,2), "z531" is zeta(5,3,1);
/// every digit after the prefix is one entry.
inline SignedIndex named_constant_index(const std::string& label)
{
    bool star = label.rfind("zs", 0) == 0;
    std::size_t start = star ? 2 : (label.rfind("z", 0) == 0 ? 1 : std::string::npos);
    if (start == std::string::npos || start == label.size())
        throw std::invalid_argument("unknown named constant " + label);
    std::vector<int> e;
    for (std::size_t i = start; i < label.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(label[i])) || label[i] == '0')
            throw std::invalid_argument("unknown named constant " + label);
        e.push_back(label[i] - '0');
    }
    return SignedIndex(e, star);
}

inline Real index_value(const SignedIndex& idx, const PrecisionContext& ctx)
{
    return ConstantCache::instance().get(canonical_text(idx), ctx, [&] { return mzv_numeric(idx, ctx).value; });
}

inline Real symbol_numeric(const Symbol& s, const PrecisionContext& ctx)
{
    if (const auto* idx = std::get_if<SignedIndex>(&s)) return index_value(*idx, ctx);
    const auto& a = std::get<ConstantAtom>(s);
    if (a.kind == ConstantAtom::Kind::Named) return index_value(named_constant_index(a.label), ctx);
    return ConstantCache::instance().get(a.text(), ctx, [&] { return basic_constant_value(a, ctx); });
}

inline Real lincomb_numeric(const LinComb& expr, const PrecisionContext& ctx)
{
    Real total = Real::exact(0);
    for (const auto& t : expr.terms()) {
        Real prod = Real::exact(1);
        for (const auto& f : t.factors) prod *= symbol_numeric(f, ctx);
        total += t.coeff * prod;
    }
    return total;
}

}  // namespace mzv
