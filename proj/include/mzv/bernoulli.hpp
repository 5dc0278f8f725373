#pragma once

#include "mzv/numeric_types.hpp"

#include <mutex>
#include <vector>

namespace mzv {

/// Exact Bernoulli number B_n with B_1 = -1/2.
inline Rational bernoulli(unsigned n)
{
    static std::mutex mu;
    static std::vector<Rational> table{Rational(1)};
    std::lock_guard<std::mutex> lock(mu);
    while (table.size() <= n) {
        unsigned m = static_cast<unsigned>(table.size());
        if (m > 1 && (m & 1U)) {
            table.emplace_back(0);
            continue;
        }
        // sum_{k<m} C(m+1,k) B_k + (m+1) B_m = 0
        Rational acc = 0;
        BigInt binom = 1;
        for (unsigned k = 0; k < m; ++k) {
            acc += Rational(binom) * table[k];
            binom = binom * (m + 1 - k) / (k + 1);
        }
        table.push_back(-acc / Rational(m + 1));
    }
    return table[n];
}

inline Rational factorial_q(unsigned n)
{
    BigInt f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

}  // namespace mzv
