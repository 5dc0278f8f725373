#pragma once

#include "mzv/index.hpp"
#include "mzv/numeric_types.hpp"

#include <cstdint>
#include <cstdlib>
#include <vector>

namespace mzv {

/// Exact partial sums v[n] = zeta_n(index) for n = 0..upper.
struct PartialSumTable {
    SignedIndex index;
    std::uint64_t upper = 0;
    std::vector<Rational> values;  // values[0] is the empty-sum convention

    const Rational& operator[](std::uint64_t n) const { return values.at(n); }
};

namespace detail {

template <class T>
T index_term(int entry, std::uint64_t k)
{
    return signed_power_term<T>(entry < 0 ? -1 : 1, std::abs(entry), k);
}

// Runs the suffix recursion
//   S_j[n] = S_j[n-1] + sgn(s_j)^n n^{-|s_j|} S_{j+1}[n-1 or n]
// from the innermost entry outwards. `visit(j, level)` sees each suffix level.
template <class T, class Visit>
std::vector<T> suffix_levels(const SignedIndex& idx, std::uint64_t N, Visit&& visit)
{
    std::vector<T> next(N + 1, T(1));
    visit(idx.depth(), next);
    for (int j = idx.depth() - 1; j >= 0; --j) {
        std::vector<T> cur(N + 1, T(0));
        int e = idx[static_cast<std::size_t>(j)];
        for (std::uint64_t n = 1; n <= N; ++n) {
            const T& inner = idx.star() ? next[n] : next[n - 1];
            cur[n] = cur[n - 1] + index_term<T>(e, n) * inner;
        }
        visit(j, cur);
        next = std::move(cur);
    }
    return next;
}

}  // namespace detail

/// All zeta_n(idx) (or the star variant) for n = 0..N in O(N * depth).
template <class T>
std::vector<T> mhs_values(const SignedIndex& idx, std::uint64_t N)
{
    return detail::suffix_levels<T>(idx, N, [](int, const std::vector<T>&) {});
}

inline PartialSumTable mhs_stream(const SignedIndex& idx, std::uint64_t N)
{
    return PartialSumTable{idx, N, mhs_values<Rational>(idx, N)};
}

inline Rational mhs(const SignedIndex& idx, std::uint64_t n) { return mhs_values<Rational>(idx, n)[n]; }

/// zeta_n(s); a negative s gives the sgn-convention sum, so that
/// zeta_partial(-s, n) == -(alternating harmonic number of order s).
inline Rational zeta_partial(int s, std::uint64_t n) { return mhs(SignedIndex({s}), n); }

}  // namespace mzv
