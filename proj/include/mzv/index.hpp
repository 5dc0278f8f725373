#pragma once

#include <charconv>
#include <compare>
#include <cstdlib>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mzv {

/// Weight and depth of an index.
struct IndexStats {
    int weight = 0;
    int depth = 0;
};

/// A signed composition (s1, ..., sm) of nonzero integers.
///
/// A negative entry marks an alternating slot: the summand for that
/// variable k carries (-1)^k. `star` selects weak (>=) rather than strict
/// (>) ordering of the summation variables. The empty index has value 1.
class SignedIndex {
  public:
    SignedIndex() = default;

    SignedIndex(std::vector<int> entries, bool star = false) : entries_(std::move(entries)), star_(star)
    {
        for (int e : entries_)
            if (e == 0) throw std::invalid_argument("index entries must be nonzero");
    }

    SignedIndex(std::initializer_list<int> entries, bool star = false)
        : SignedIndex(std::vector<int>(entries), star)
    {
    }

    const std::vector<int>& entries() const noexcept { return entries_; }
    bool star() const noexcept { return star_; }
    bool empty() const noexcept { return entries_.empty(); }
    int depth() const noexcept { return static_cast<int>(entries_.size()); }
    int operator[](std::size_t i) const { return entries_.at(i); }

    int weight() const noexcept
    {
        int w = 0;
        for (int e : entries_) w += std::abs(e);
        return w;
    }

    IndexStats stats() const noexcept { return {weight(), depth()}; }

    SignedIndex with_star(bool star) const
    {
        SignedIndex out = *this;
        out.star_ = star;
        return out;
    }

    /// Entries [first, first+count) keeping the star flag.
    SignedIndex slice(std::size_t first, std::size_t count) const
    {
        std::vector<int> e(entries_.begin() + static_cast<std::ptrdiff_t>(first),
                           entries_.begin() + static_cast<std::ptrdiff_t>(first + count));
        return SignedIndex(std::move(e), star_);
    }

    SignedIndex suffix(std::size_t first) const { return slice(first, entries_.size() - first); }

    friend auto operator<=>(const SignedIndex&, const SignedIndex&) = default;
    friend bool operator==(const SignedIndex&, const SignedIndex&) = default;

  private:
    std::vector<int> entries_;
    bool star_ = false;
};

inline SignedIndex make_index(std::vector<int> entries, bool star) { return SignedIndex(std::move(entries), star); }

/// Convergent as an infinite nested sum: the first entry is not +1.
inline bool is_admissible(const SignedIndex& idx) { return idx.empty() || idx[0] != 1; }

/// The stricter partial-sum condition s1 + ... + sj > j on absolute values,
/// reported for information only.
inline bool satisfies_partial_sum_condition(const SignedIndex& idx)
{
    int acc = 0;
    for (int j = 0; j < idx.depth(); ++j) {
        acc += std::abs(idx[static_cast<std::size_t>(j)]);
        if (acc <= j + 1) return false;
    }
    return true;
}

inline SignedIndex concat(const SignedIndex& a, const SignedIndex& b)
{
    std::vector<int> e = a.entries();
    e.insert(e.end(), b.entries().begin(), b.entries().end());
    return SignedIndex(std::move(e), a.star());
}

/// "z(2,1)", "z(-2,1)", "zs(3,1)"; the empty index is "z()".
inline std::string canonical_text(const SignedIndex& idx)
{
    std::string out = idx.star() ? "zs(" : "z(";
    for (int j = 0; j < idx.depth(); ++j) {
        if (j) out += ',';
        out += std::to_string(idx[static_cast<std::size_t>(j)]);
    }
    out += ')';
    return out;
}

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : std::runtime_error(format(msg, line, column)), line_(line), column_(column)
    {
    }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    static std::string format(const std::string& msg, std::size_t line, std::size_t column)
    {
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
    }
    std::size_t line_;
    std::size_t column_;
};

/// Parses the canonical text form. Whitespace between tokens is allowed.
inline SignedIndex parse_index(std::string_view text)
{
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    auto fail = [&](const std::string& msg) -> SignedIndex { throw ParseError(msg, 1, pos + 1); };

    skip();
    bool star = false;
    if (text.substr(pos, 3) == "zs(") {
        star = true;
        pos += 3;
    } else if (text.substr(pos, 2) == "z(") {
        pos += 2;
    } else {
        return fail("expected 'z(' or 'zs('");
    }
    std::vector<int> entries;
    skip();
    if (pos < text.size() && text[pos] == ')') {
        ++pos;
    } else {
        for (;;) {
            skip();
            int v = 0;
            const char* first = text.data() + pos;
            const char* last = text.data() + text.size();
            if (pos < text.size() && text[pos] == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc()) return fail("expected integer entry");
            if (v == 0) return fail("index entries must be nonzero");
            entries.push_back(v);
            pos = static_cast<std::size_t>(ptr - text.data());
            skip();
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                continue;
            }
            if (pos < text.size() && text[pos] == ')') {
                ++pos;
                break;
            }
            return fail("expected ',' or ')'");
        }
    }
    skip();
    if (pos != text.size()) return fail("trailing characters after index");
    return SignedIndex(std::move(entries), star);
}

}  // namespace mzv
