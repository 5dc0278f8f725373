#pragma once

#include "mzv/constants.hpp"
#include "mzv/index.hpp"
#include "mzv/numeric_types.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mzv {

/// A factor of a term: an (alternating, possibly star) zeta value or a constant.
using Symbol = std::variant<SignedIndex, ConstantAtom>;

inline std::string symbol_text(const Symbol& s)
{
    if (const auto* idx = std::get_if<SignedIndex>(&s)) return canonical_text(*idx);
    return std::get<ConstantAtom>(s).text();
}

/// Depth-1 zeta atoms are stored as indices so that z(3) has one spelling.
inline Symbol canonical_symbol(Symbol s)
{
    if (const auto* a = std::get_if<ConstantAtom>(&s))
        if (a->kind == ConstantAtom::Kind::Zeta) return SignedIndex({a->s});
    return s;
}

struct Term {
    Rational coeff = 1;
    std::vector<Symbol> factors;  // multiset, sorted by symbol_text once normalized

    std::string key() const
    {
        std::string k;
        for (const auto& f : factors) {
            if (!k.empty()) k += '*';
            k += symbol_text(f);
        }
        return k;
    }
};

inline std::string format_rational(const Rational& q) { return q.str(); }

/// Formal rational-linear combination of products of symbols.
class LinComb {
  public:
    LinComb() = default;
    explicit LinComb(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static LinComb symbol(Symbol s, Rational coeff = 1)
    {
        return LinComb({Term{std::move(coeff), {canonical_symbol(std::move(s))}}});
    }
    static LinComb constant(Rational c) { return LinComb({Term{std::move(c), {}}}); }

    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    LinComb& operator+=(const LinComb& o)
    {
        terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
        return *this;
    }
    LinComb& operator-=(const LinComb& o) { return *this += o * Rational(-1); }

    friend LinComb operator+(LinComb a, const LinComb& b) { return a += b; }
    friend LinComb operator-(LinComb a, const LinComb& b) { return a -= b; }
    friend LinComb operator*(LinComb a, const Rational& q)
    {
        for (auto& t : a.terms_) t.coeff *= q;
        return a;
    }
    friend LinComb operator*(const Rational& q, LinComb a) { return std::move(a) * q; }

    /// Formal product: factors are concatenated, nothing is expanded.
    friend LinComb operator*(const LinComb& a, const LinComb& b)
    {
        std::vector<Term> out;
        for (const auto& x : a.terms_)
            for (const auto& y : b.terms_) {
                Term t{x.coeff * y.coeff, x.factors};
                t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
                out.push_back(std::move(t));
            }
        return LinComb(std::move(out));
    }

  private:
    std::vector<Term> terms_;
};

/// Merges equal factor multisets, drops zero coefficients, orders terms by
/// their canonical text.
inline LinComb normalize(const LinComb& lc)
{
    std::map<std::string, Term> merged;
    for (Term t : lc.terms()) {
        for (auto& f : t.factors) f = canonical_symbol(f);
        // zeta of the empty index is 1
        std::erase_if(t.factors, [](const Symbol& f) {
            const auto* idx = std::get_if<SignedIndex>(&f);
            return idx && idx->empty();
        });
        std::sort(t.factors.begin(), t.factors.end(),
                  [](const Symbol& a, const Symbol& b) { return symbol_text(a) < symbol_text(b); });
        auto k = t.key();
        auto it = merged.find(k);
        if (it == merged.end())
            merged.emplace(std::move(k), std::move(t));
        else
            it->second.coeff += t.coeff;
    }
    std::vector<Term> out;
    for (auto& [k, t] : merged)
        if (t.coeff != 0) out.push_back(std::move(t));
    return LinComb(std::move(out));
}

inline bool operator==(const LinComb& a, const LinComb& b)
{
    auto x = normalize(a), y = normalize(b);
    if (x.terms().size() != y.terms().size()) return false;
    for (std::size_t i = 0; i < x.terms().size(); ++i)
        if (x.terms()[i].key() != y.terms()[i].key() || x.terms()[i].coeff != y.terms()[i].coeff) return false;
    return true;
}

/// Corpus expression syntax, e.g. "2*z(2)*z(2,1) + z(3) - z(2)^2".
inline std::string to_string(const LinComb& lc)
{
    LinComb n = normalize(lc);
    if (n.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : n.terms()) {
        Rational c = t.coeff;
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        first = false;
        c = abs(c);
        std::string body;
        for (std::size_t i = 0; i < t.factors.size();) {
            std::size_t j = i;
            while (j < t.factors.size() && symbol_text(t.factors[j]) == symbol_text(t.factors[i])) ++j;
            if (!body.empty()) body += '*';
            body += symbol_text(t.factors[i]);
            if (j - i > 1) body += "^" + std::to_string(j - i);
            i = j;
        }
        if (body.empty())
            out += format_rational(c);
        else if (c == 1)
            out += body;
        else
            out += format_rational(c) + "*" + body;
    }
    return out;
}

namespace detail {

inline int merge_entries(int a, int b)
{
    int sign = ((a < 0) != (b < 0)) ? -1 : 1;
    return sign * (std::abs(a) + std::abs(b));
}

inline void stuffle_words(const std::vector<int>& u, std::size_t i, const std::vector<int>& v, std::size_t j,
                          std::vector<int>& prefix, std::vector<std::vector<int>>& out)
{
    if (i == u.size() || j == v.size()) {
        std::vector<int> w = prefix;
        w.insert(w.end(), u.begin() + static_cast<std::ptrdiff_t>(i), u.end());
        w.insert(w.end(), v.begin() + static_cast<std::ptrdiff_t>(j), v.end());
        out.push_back(std::move(w));
        return;
    }
    prefix.push_back(u[i]);
    stuffle_words(u, i + 1, v, j, prefix, out);
    prefix.back() = v[j];
    stuffle_words(u, i, v, j + 1, prefix, out);
    prefix.back() = merge_entries(u[i], v[j]);
    stuffle_words(u, i + 1, v, j + 1, prefix, out);
    prefix.pop_back();
}

}  // namespace detail

/// Quasi-shuffle product of two non-star indices. Merged entries add in
/// absolute value and multiply in sign.
inline LinComb stuffle(const SignedIndex& u, const SignedIndex& v)
{
    if (u.star() || v.star()) throw std::invalid_argument("stuffle takes non-star indices; expand star values first");
    std::vector<std::vector<int>> words;
    std::vector<int> prefix;
    detail::stuffle_words(u.entries(), 0, v.entries(), 0, prefix, words);
    LinComb out;
    for (auto& w : words) {
        if (w.empty())
            out += LinComb::constant(1);
        else
            out += LinComb::symbol(SignedIndex(std::move(w)));
    }
    return normalize(out);
}

/// Bilinear extension of stuffle to combinations of single non-star indices
/// (and rational constants).
inline LinComb stuffle(const LinComb& a, const LinComb& b)
{
    LinComb out;
    auto as_index = [](const Term& t) {
        if (t.factors.empty()) return SignedIndex();
        if (t.factors.size() != 1 || !std::holds_alternative<SignedIndex>(t.factors[0]))
            throw std::invalid_argument("stuffle of combinations needs single-index terms");
        return std::get<SignedIndex>(t.factors[0]);
    };
    for (const auto& x : a.terms())
        for (const auto& y : b.terms()) out += stuffle(as_index(x), as_index(y)) * (x.coeff * y.coeff);
    return normalize(out);
}

/// zeta*(s) as the sum over all merges of consecutive entries (2^{m-1} terms).
inline LinComb star_expand(const SignedIndex& idx)
{
    if (!idx.star()) throw std::invalid_argument("star_expand takes a star index");
    const int m = idx.depth();
    if (m == 0) return LinComb::constant(1);
    LinComb out;
    for (unsigned mask = 0; mask < (1U << (m - 1)); ++mask) {
        std::vector<int> w{idx[0]};
        for (int j = 1; j < m; ++j) {
            int e = idx[static_cast<std::size_t>(j)];
            if (mask & (1U << (j - 1)))
                w.back() = detail::merge_entries(w.back(), e);
            else
                w.push_back(e);
        }
        out += LinComb::symbol(SignedIndex(std::move(w)));
    }
    return normalize(out);
}

/// Same merge rule; named separately for indices with alternating entries.
inline LinComb star_expand_signed(const SignedIndex& idx) { return star_expand(idx); }

/// Replaces every star index in a combination by its expansion.
inline LinComb expand_stars(const LinComb& lc)
{
    LinComb out;
    for (const auto& t : lc.terms()) {
        LinComb prod = LinComb::constant(t.coeff);
        for (const auto& f : t.factors) {
            const auto* idx = std::get_if<SignedIndex>(&f);
            prod = prod * ((idx && idx->star()) ? star_expand(*idx) : LinComb::symbol(f));
        }
        out += prod;
    }
    return normalize(out);
}

}  // namespace mzv
