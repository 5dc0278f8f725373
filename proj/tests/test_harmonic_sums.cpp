#include "mzv/harmonic_sums.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using mzv::Rational;
using mzv::SignedIndex;

namespace {

Rational term(int s, long k)
{
    Rational v(1);
    for (int i = 0; i < std::abs(s); ++i) v /= k;
    return (s < 0 && k % 2 == 1) ? -v : v;
}

// nested loops over n >= k1 > k2 > ... (>= for star values)
Rational brute(const SignedIndex& idx, long n)
{
    std::function<Rational(int, long)> rec = [&](int j, long bound) -> Rational {
        if (j == idx.depth()) return Rational(1);
        Rational s = 0;
        for (long k = 1; k <= bound; ++k) s += term(idx[static_cast<std::size_t>(j)], k) * rec(j + 1, idx.star() ? k : k - 1);
        return s;
    };
    return rec(0, n);
}

// every way of merging consecutive blocks; absolute values add, signs multiply
std::vector<SignedIndex> contractions(const std::vector<int>& e)
{
    std::vector<SignedIndex> out;
    if (e.empty()) return {SignedIndex{}};
    const std::size_t cuts = e.size() - 1;
    for (std::size_t mask = 0; mask < (std::size_t{1} << cuts); ++mask) {
        std::vector<int> w{e[0]};
        for (std::size_t i = 1; i < e.size(); ++i) {
            if (mask >> (i - 1) & 1U) {
                int a = w.back(), b = e[i];
                int sign = ((a < 0) != (b < 0)) ? -1 : 1;
                w.back() = sign * (std::abs(a) + std::abs(b));
            } else {
                w.push_back(e[i]);
            }
        }
        out.emplace_back(w);
    }
    return out;
}

SignedIndex random_index(std::mt19937& rng, int max_depth, int max_weight, bool star)
{
    std::uniform_int_distribution<int> depth(1, max_depth), coin(0, 1);
    for (;;) {
        std::vector<int> e(static_cast<std::size_t>(depth(rng)));
        int w = 0;
        for (int& v : e) {
            v = std::uniform_int_distribution<int>(1, 4)(rng);
            w += v;
            if (coin(rng)) v = -v;
        }
        if (w <= max_weight) return SignedIndex(e, star);
    }
}

}  // namespace

TEST(ZetaPartial, Examples)
{
    EXPECT_EQ(mzv::zeta_partial(1, 3), Rational(11, 6));
    EXPECT_EQ(mzv::zeta_partial(2, 1), Rational(1));
    EXPECT_EQ(mzv::zeta_partial(-1, 2), Rational(-1, 2));
    EXPECT_EQ(mzv::zeta_partial(5, 0), Rational(0));
}

TEST(Mhs, Examples)
{
    EXPECT_EQ(mzv::mhs(SignedIndex({2, 1}), 2), Rational(1, 4));
    EXPECT_EQ(mzv::mhs(SignedIndex({2, 1}, true), 2), Rational(11, 8));
    EXPECT_EQ(mzv::mhs(SignedIndex({3, -2, 1}), 0), Rational(0));
    EXPECT_EQ(mzv::mhs(SignedIndex{}, 5), Rational(1));
}

TEST(MhsStream, Examples)
{
    auto t = mzv::mhs_stream(SignedIndex({2}), 3);
    EXPECT_EQ(t[1], Rational(1));
    EXPECT_EQ(t[2], Rational(5, 4));
    EXPECT_EQ(t[3], Rational(49, 36));

    auto u = mzv::mhs_stream(SignedIndex({2, 1}), 2);
    EXPECT_EQ(u[1], Rational(0));
    EXPECT_EQ(u[2], Rational(1, 4));

    EXPECT_EQ(mzv::mhs_stream(SignedIndex({1}), 1)[1], Rational(1));
}

TEST(MhsStream, MatchesNestedLoopOracle)
{
    std::mt19937 rng(2024);
    for (int t = 0; t < 60; ++t) {
        auto idx = random_index(rng, 3, 8, t % 2 == 1);
        const long N = 30;
        auto table = mzv::mhs_stream(idx, N);
        for (long n : {0L, 1L, 2L, 7L, 19L, 30L}) {
            auto want = brute(idx, n);
            EXPECT_EQ(table[static_cast<std::uint64_t>(n)], want) << mzv::canonical_text(idx) << " n=" << n;
            EXPECT_EQ(mzv::mhs(idx, static_cast<std::uint64_t>(n)), want);
        }
    }
}

TEST(MhsStream, MonotoneForPositiveEntries)
{
    for (bool star : {false, true}) {
        auto t = mzv::mhs_stream(SignedIndex({3, 1, 2}, star), 40);
        for (std::uint64_t n = 1; n <= 40; ++n) EXPECT_LE(t[n - 1], t[n]);
    }
}

TEST(FiniteIdentities, StarPairSymmetry)
{
    for (int m = 1; m <= 4; ++m)
        for (int p = 1; p <= 4; ++p) {
            auto table_mp = mzv::mhs_stream(SignedIndex({m, p}, true), 40);
            auto table_pm = mzv::mhs_stream(SignedIndex({p, m}, true), 40);
            for (std::uint64_t n = 0; n <= 40; ++n) {
                auto rhs = mzv::zeta_partial(p, n) * mzv::zeta_partial(m, n) + mzv::zeta_partial(p + m, n);
                EXPECT_EQ(table_mp[n] + table_pm[n], rhs) << m << "," << p << " n=" << n;
            }
        }
}

TEST(FiniteIdentities, StarContraction)
{
    std::mt19937 rng(99);
    for (int t = 0; t < 40; ++t) {
        auto idx = random_index(rng, 3, 8, true);
        auto star_table = mzv::mhs_stream(idx, 50);
        std::vector<mzv::PartialSumTable> parts;
        for (const auto& c : contractions(idx.entries())) parts.push_back(mzv::mhs_stream(c, 50));
        for (std::uint64_t n = 0; n <= 50; ++n) {
            Rational s = 0;
            for (const auto& p : parts) s += p[n];
            EXPECT_EQ(star_table[n], s) << mzv::canonical_text(idx) << " n=" << n;
        }
    }
}

TEST(FiniteIdentities, BarredPartialSums)
{
    for (int s = 1; s <= 6; ++s) {
        Rational alt = 0;  // sum (-1)^{k-1} / k^s
        for (long k = 1; k <= 40; ++k) {
            alt -= term(-s, k);
            EXPECT_EQ(mzv::zeta_partial(-s, static_cast<std::uint64_t>(k)), -alt);
        }
    }
}
