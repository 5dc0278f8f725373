#pragma once

#include "mzv/tail_sums.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace mzv {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

/// Corpus expression tree. Numbers are non-negative; signs live in Sum nodes.
struct Expr {
    enum class Kind { Number, Atom, Series, Sum, Product, Power };
    Kind kind = Kind::Number;
    Rational number = 0;
    Symbol atom;
    TailSeriesSpec series;
    std::vector<Expr> children;
    std::vector<int> signs;  // Sum: one per child
    unsigned exponent = 1;   // Power

    static Expr num(Rational q)
    {
        Expr e;
        e.number = std::move(q);
        return e;
    }
    static Expr sym(Symbol s)
    {
        Expr e;
        e.kind = Kind::Atom;
        e.atom = canonical_symbol(std::move(s));
        return e;
    }
    static Expr of_series(TailSeriesSpec s)
    {
        Expr e;
        e.kind = Kind::Series;
        e.series = std::move(s);
        return e;
    }
};

inline bool operator==(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Expr::Kind::Number: return a.number == b.number;
    case Expr::Kind::Atom: return symbol_text(a.atom) == symbol_text(b.atom);
    case Expr::Kind::Series: return a.series == b.series;
    case Expr::Kind::Sum: return a.signs == b.signs && a.children == b.children;
    case Expr::Kind::Product: return a.children == b.children;
    case Expr::Kind::Power: return a.exponent == b.exponent && a.children == b.children;
    }
    return false;
}

inline std::string to_string(const Expr& e)
{
    // a/b reads back as a division, so fractions need parentheses as a base
    // or after another factor
    auto fraction = [](const Expr& c) {
        return c.kind == Expr::Kind::Number && boost::multiprecision::denominator(c.number) != 1;
    };
    auto wrapped = [&](const Expr& c) {
        bool paren = c.kind == Expr::Kind::Sum || c.kind == Expr::Kind::Product || c.kind == Expr::Kind::Power ||
                     fraction(c);
        return paren ? "(" + to_string(c) + ")" : to_string(c);
    };
    switch (e.kind) {
    case Expr::Kind::Number: return e.number.str();
    case Expr::Kind::Atom: return symbol_text(e.atom);
    case Expr::Kind::Series: return e.series.text();
    case Expr::Kind::Sum: {
        std::string out;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            const Expr& c = e.children[i];
            std::string body = c.kind == Expr::Kind::Sum ? "(" + to_string(c) + ")" : to_string(c);
            if (i == 0)
                out += (e.signs[i] < 0 ? "-" : "") + body;
            else
                out += (e.signs[i] < 0 ? " - " : " + ") + body;
        }
        return out;
    }
    case Expr::Kind::Product: {
        std::string out;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            const Expr& c = e.children[i];
            bool paren = c.kind == Expr::Kind::Sum || c.kind == Expr::Kind::Product || (i && fraction(c));
            if (i) out += '*';
            out += paren ? "(" + to_string(c) + ")" : to_string(c);
        }
        return out;
    }
    case Expr::Kind::Power: return wrapped(e.children[0]) + "^" + std::to_string(e.exponent);
    }
    return {};
}

struct ExprValue {
    Real value;
    std::uint64_t terms_used = 0;
};

inline ExprValue evaluate_expr(const Expr& e, const PrecisionContext& ctx)
{
    switch (e.kind) {
    case Expr::Kind::Number: return {Real::exact(e.number), 0};
    case Expr::Kind::Atom: return {symbol_numeric(e.atom, ctx), 0};
    case Expr::Kind::Series: {
        auto v = evaluate_builder(e.series, ctx);
        return {v.value, v.terms_used};
    }
    case Expr::Kind::Sum: {
        ExprValue out{Real::exact(0), 0};
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            auto c = evaluate_expr(e.children[i], ctx);
            out.value = e.signs[i] < 0 ? out.value - c.value : out.value + c.value;
            out.terms_used = std::max(out.terms_used, c.terms_used);
        }
        return out;
    }
    case Expr::Kind::Product: {
        ExprValue out{Real::exact(1), 0};
        for (const auto& ch : e.children) {
            auto c = evaluate_expr(ch, ctx);
            out.value *= c.value;
            out.terms_used = std::max(out.terms_used, c.terms_used);
        }
        return out;
    }
    case Expr::Kind::Power: {
        auto c = evaluate_expr(e.children[0], ctx);
        return {ipow(c.value, e.exponent), c.terms_used};
    }
    }
    return {};
}

/// The expression as a formal combination; fails on series builders.
inline LinComb to_lincomb(const Expr& e)
{
    switch (e.kind) {
    case Expr::Kind::Number: return LinComb::constant(e.number);
    case Expr::Kind::Atom: return LinComb::symbol(e.atom);
    case Expr::Kind::Series: throw std::invalid_argument("series builder has no closed form: " + e.series.text());
    case Expr::Kind::Sum: {
        LinComb out;
        for (std::size_t i = 0; i < e.children.size(); ++i) out += to_lincomb(e.children[i]) * Rational(e.signs[i]);
        return normalize(out);
    }
    case Expr::Kind::Product: {
        LinComb out = LinComb::constant(1);
        for (const auto& c : e.children) out = out * to_lincomb(c);
        return normalize(out);
    }
    case Expr::Kind::Power: {
        LinComb base = to_lincomb(e.children[0]), out = LinComb::constant(1);
        for (unsigned i = 0; i < e.exponent; ++i) out = out * base;
        return normalize(out);
    }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct IdentityRecord {
    std::string id;
    Expr lhs;
    Expr rhs;
    std::string source;
    std::optional<double> tolerance_override;
    std::optional<std::string> skip_reason;
    std::size_t line = 0;

    friend bool operator==(const IdentityRecord& a, const IdentityRecord& b)
    {
        return a.id == b.id && a.lhs == b.lhs && a.rhs == b.rhs && a.source == b.source &&
               a.tolerance_override == b.tolerance_override && a.skip_reason == b.skip_reason;
    }
};

namespace detail {

/// Argument-group shapes per builder family; 0 means "one or more".
inline bool builder_shape_ok(const TailSeriesSpec& s)
{
    static const std::map<std::string, std::vector<std::vector<std::size_t>>> shapes{
        {"F2", {{2}, {2, 1}}},   {"F2alt", {{2}}},       {"F3", {{3}}},         {"W", {{2, 1}}},
        {"Q", {{0, 1}, {0, 1, 1}}}, {"LS", {{1, 1}, {1, 1, 1}}}, {"L", {{1}}},  {"PT", {{2, 1}}},
        {"M", {{2, 1}}},         {"C2", {{2, 1}}},       {"C3", {{3, 1}}},      {"X3", {{3, 1}}},
        {"R", {{2, 2}}},         {"FS2", {{2}}},         {"FS3", {{1}}},        {"T32", {{2}}},
        {"T39", {{2, 1}}},       {"T12", {{2, 1}}},
    };
    auto it = shapes.find(s.family);
    if (it == shapes.end()) return false;
    for (const auto& shape : it->second) {
        if (shape.size() != s.groups.size()) continue;
        bool ok = true;
        for (std::size_t g = 0; g < shape.size() && ok; ++g)
            ok = shape[g] == 0 ? !s.groups[g].empty() : s.groups[g].size() == shape[g];
        if (ok) return true;
    }
    return false;
}

class CorpusParser {
  public:
    explicit CorpusParser(std::string_view text) : t_(text) {}

    std::vector<IdentityRecord> records()
    {
        std::vector<IdentityRecord> out;
        std::set<std::string> seen;
        for (;;) {
            skip();
            if (eof()) break;
            auto [line, col] = here();
            IdentityRecord r = record();
            if (!seen.insert(r.id).second) throw ParseError("duplicate id '" + r.id + "'", line, col);
            out.push_back(std::move(r));
        }
        return out;
    }

    Expr lone_expression()
    {
        Expr e = expr();
        skip();
        if (!eof()) fail("unexpected '" + std::string(1, peek()) + "' after expression");
        return e;
    }

  private:
    std::string_view t_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= t_.size(); }
    char peek() const { return eof() ? '\0' : t_[pos_]; }

    std::pair<std::size_t, std::size_t> here(std::size_t at) const
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < t_.size(); ++i) {
            if (t_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }
    std::pair<std::size_t, std::size_t> here() const { return here(pos_); }

    [[noreturn]] void fail(const std::string& msg, std::optional<std::size_t> at = {}) const
    {
        auto [l, c] = here(at.value_or(pos_));
        throw ParseError(msg, l, c);
    }

    void skip()
    {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    bool accept(char c)
    {
        skip();
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    void expect(char c, const std::string& what)
    {
        if (!accept(c)) fail(eof() ? "unexpected end of input, expected " + what : "expected " + what);
    }

    /// Expects `c` closing a bracket opened at `open`.
    void close(char c, std::size_t open, const std::string& what)
    {
        skip();
        if (eof()) fail("unclosed '(' (expected " + what + ")", open);
        expect(c, what);
    }

    std::string ident()
    {
        skip();
        std::size_t start = pos_;
        if (eof() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) return {};
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
        return std::string(t_.substr(start, pos_ - start));
    }

    long integer()
    {
        skip();
        long v = 0;
        auto [ptr, ec] = std::from_chars(t_.data() + pos_, t_.data() + t_.size(), v);
        if (ec != std::errc() || v < 0) fail("expected integer");
        pos_ = static_cast<std::size_t>(ptr - t_.data());
        return v;
    }

    long signed_integer()
    {
        skip();
        bool neg = false;
        if (peek() == '-' || peek() == '+') {
            neg = peek() == '-';
            ++pos_;
        }
        long v = integer();
        return neg ? -v : v;
    }

    Rational signed_rational()
    {
        long n = signed_integer();
        skip();
        if (peek() == '/') {
            ++pos_;
            long d = integer();
            if (d == 0) fail("zero denominator");
            return Rational(n, d);
        }
        return Rational(n);
    }

    std::string quoted()
    {
        skip();
        if (peek() != '"') fail("expected quoted string");
        std::size_t open = pos_++;
        std::string out;
        while (!eof() && peek() != '"') {
            if (peek() == '\\' && pos_ + 1 < t_.size()) ++pos_;
            out += t_[pos_++];
        }
        if (eof()) fail("unterminated string", open);
        ++pos_;
        return out;
    }

    IdentityRecord record()
    {
        IdentityRecord r;
        r.line = here().first;
        if (ident() != "id") fail("expected 'id'");
        skip();
        std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || std::string_view("_.+-").find(peek()) !=
                                                                                  std::string_view::npos))
            ++pos_;
        if (pos_ == start) fail("expected record name");
        r.id = std::string(t_.substr(start, pos_ - start));
        expect(':', "':'");
        std::size_t kw = pos_;
        if (ident() != "series") fail("expected 'series'", kw);
        r.lhs = expr();
        expect('=', "'='");
        r.rhs = expr();
        for (;;) {
            skip();
            if (peek() != '@') break;
            ++pos_;
            std::size_t at = pos_;
            std::string d = ident();
            if (d == "source") {
                r.source = quoted();
            } else if (d == "skip") {
                r.skip_reason = quoted();
            } else if (d == "tol") {
                skip();
                double v = 0;
                auto [ptr, ec] = std::from_chars(t_.data() + pos_, t_.data() + t_.size(), v);
                if (ec != std::errc() || !(v > 0)) fail("expected positive tolerance");
                pos_ = static_cast<std::size_t>(ptr - t_.data());
                r.tolerance_override = v;
            } else {
                fail("unknown directive '@" + d + "' (expected @source, @tol or @skip)", at);
            }
        }
        return r;
    }

    Expr expr()
    {
        Expr sum;
        sum.kind = Expr::Kind::Sum;
        int sign = 1;
        skip();
        if (accept('-'))
            sign = -1;
        else
            accept('+');
        for (;;) {
            sum.children.push_back(term());
            sum.signs.push_back(sign);
            skip();
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++pos_;
                continue;
            }
            break;
        }
        if (sum.children.size() == 1 && sum.signs[0] > 0) return std::move(sum.children[0]);
        return sum;
    }

    Expr term()
    {
        Expr prod;
        prod.kind = Expr::Kind::Product;
        prod.children.push_back(factor());
        for (;;) {
            skip();
            if (peek() == '*') {
                ++pos_;
                prod.children.push_back(factor());
            } else if (peek() == '/') {
                ++pos_;
                long d = integer();
                if (d == 0) fail("division by zero");
                Expr& last = prod.children.back();
                if (last.kind == Expr::Kind::Number)
                    last.number /= d;
                else
                    prod.children.push_back(Expr::num(Rational(1, d)));
            } else {
                break;
            }
        }
        if (prod.children.size() == 1) return std::move(prod.children[0]);
        return prod;
    }

    Expr factor()
    {
        Expr base = primary();
        skip();
        if (peek() == '^') {
            ++pos_;
            long e = integer();
            Expr p;
            p.kind = Expr::Kind::Power;
            p.exponent = static_cast<unsigned>(e);
            p.children.push_back(std::move(base));
            return p;
        }
        return base;
    }

    Expr primary()
    {
        skip();
        if (eof()) fail("unexpected end of input, expected a number, atom, builder or '('");
        char c = peek();
        if (c == '(') {
            std::size_t open = pos_++;
            Expr e = expr();
            close(')', open, "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return Expr::num(Rational(integer()));
        std::size_t at = pos_;
        std::string name = ident();
        if (name.empty()) fail("expected a number, atom, builder or '('");
        if (name == "ln2") return Expr::sym(ConstantAtom::log2());
        if (name == "pi") return Expr::sym(ConstantAtom::pi());
        skip();
        if (peek() != '(') fail("unknown atom '" + name + "'", at);
        std::size_t open = pos_++;
        if (name == "z" || name == "zs") {
            std::vector<int> entries;
            skip();
            if (peek() != ')') {
                do {
                    long v = signed_integer();
                    if (v == 0) fail("index entries must be nonzero");
                    entries.push_back(static_cast<int>(v));
                } while (accept(','));
            }
            close(')', open, "',' or ')'");
            return Expr::sym(SignedIndex(std::move(entries), name == "zs"));
        }
        if (name == "Li") {
            long p = integer();
            expect(',', "','");
            Rational x = signed_rational();
            close(')', open, "')'");
            try {
                return Expr::sym(ConstantAtom::polylog(static_cast<int>(p), x));
            } catch (const std::invalid_argument& e) {
                fail(e.what(), at);
            }
        }
        if (name == "const") {
            std::string label = ident();
            close(')', open, "')'");
            try {
                (void)named_constant_index(label);
            } catch (const std::invalid_argument&) {
                fail("unknown atom 'const(" + label + ")'", at);
            }
            return Expr::sym(ConstantAtom::named(label));
        }
        if (!builder_families().count(name)) fail("unknown builder or atom '" + name + "'", at);
        TailSeriesSpec spec{name, {{}}};
        skip();
        if (peek() != ')') {
            for (;;) {
                spec.groups.back().push_back(builder_arg());
                skip();
                if (eof()) fail("unclosed '(' (expected ',' ';' or ')')", open);
                if (accept(',')) continue;
                if (accept(';')) {
                    spec.groups.emplace_back();
                    continue;
                }
                break;
            }
        }
        close(')', open, "',' ';' or ')'");
        if (!builder_shape_ok(spec)) fail("wrong argument shape for builder " + spec.text(), at);
        return Expr::of_series(std::move(spec));
    }

    BuilderArg builder_arg()
    {
        skip();
        if (t_.substr(pos_, 2) == "x=") pos_ += 2;
        skip();
        if (eof()) return {};
        if (peek() == '+' || peek() == '-') {
            std::size_t save = pos_++;
            skip();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) return {Rational(t_[save] == '-' ? -1 : 1), true};
            pos_ = save;
        }
        return {signed_rational(), false};
    }
};

inline std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline Expr parse_expression(std::string_view text) { return detail::CorpusParser(text).lone_expression(); }

inline std::vector<IdentityRecord> parse_corpus(std::string_view text) { return detail::CorpusParser(text).records(); }

inline std::string serialize(const IdentityRecord& r)
{
    std::string out = "id " + r.id + " : series " + to_string(r.lhs) + " = " + to_string(r.rhs);
    if (!r.source.empty()) out += " @source " + detail::quote(r.source);
    if (r.tolerance_override) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *r.tolerance_override);
        out += " @tol " + std::string(buf, ptr);
    }
    if (r.skip_reason) out += " @skip " + detail::quote(*r.skip_reason);
    return out;
}

inline std::string serialize(const std::vector<IdentityRecord>& records)
{
    std::string out;
    for (const auto& r : records) out += serialize(r) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct RecordResult {
    std::string id;
    std::string source;
    Real lhs;
    Real rhs;
    Float gap = 0;
    Float err_budget = 0;
    bool pass = false;
    bool skipped = false;
    std::uint64_t terms_used = 0;
    double ms = 0;
    std::string error;
};

struct VerificationReport {
    PrecisionContext context;
    std::vector<RecordResult> results;  // sorted by id
    std::size_t total = 0, passed = 0, failed = 0, skipped = 0;

    bool all_passed() const { return failed == 0; }
};

inline RecordResult verify_record(const IdentityRecord& r, const PrecisionContext& ctx)
{
    RecordResult out;
    out.id = r.id;
    out.source = r.source;
    if (r.skip_reason) {
        out.skipped = true;
        out.error = "skipped: " + *r.skip_reason;
        return out;
    }
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto l = evaluate_expr(r.lhs, ctx);
        auto rv = evaluate_expr(r.rhs, ctx);
        out.lhs = l.value;
        out.rhs = rv.value;
        out.terms_used = std::max(l.terms_used, rv.terms_used);
        out.gap = abs(l.value.value() - rv.value.value());
        out.err_budget = l.value.err() + rv.value.err() + Float(r.tolerance_override.value_or(ctx.target_tol));
        out.pass = out.gap <= out.err_budget;
    } catch (const std::exception& e) {
        out.error = e.what();
        out.pass = false;
    }
    out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Verifies every record on up to `jobs` threads; results are ordered by id.
inline VerificationReport verify_corpus(const std::vector<IdentityRecord>& records, const PrecisionContext& ctx,
                                        unsigned jobs = 1)
{
    ctx.activate();
    VerificationReport rep;
    rep.context = ctx;
    rep.results.resize(records.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < records.size();) rep.results[i] = verify_record(records[i], ctx);
    };
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(records.size(), 1))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::sort(rep.results.begin(), rep.results.end(),
              [](const RecordResult& a, const RecordResult& b) { return a.id < b.id; });
    rep.total = rep.results.size();
    for (const auto& r : rep.results) {
        if (r.skipped)
            ++rep.skipped;
        else if (r.pass)
            ++rep.passed;
        else
            ++rep.failed;
    }
    return rep;
}

/// Flat versioned JSON; numbers as strings so that output is byte-stable.
/// Per-record timings are included only on request.
inline nlohmann::ordered_json report_json(const VerificationReport& rep, bool include_timing = false)
{
    const int digits = static_cast<int>(rep.context.working_digits) - 5;
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["context"] = {{"digits", rep.context.working_digits},
                    {"tol", to_scientific(Float(rep.context.target_tol), 3)},
                    {"max_n", rep.context.max_n}};
    auto results = nlohmann::ordered_json::array();
    for (const auto& r : rep.results) {
        nlohmann::ordered_json e;
        e["id"] = r.id;
        e["source"] = r.source;
        if (r.skipped) {
            e["skipped"] = true;
            e["pass"] = false;
            e["error"] = r.error;
            results.push_back(std::move(e));
            continue;
        }
        e["lhs"] = to_decimal(r.lhs.value(), digits);
        e["rhs"] = to_decimal(r.rhs.value(), digits);
        e["gap"] = to_scientific(r.gap, 3);
        e["err_budget"] = to_scientific(r.err_budget, 3);
        e["pass"] = r.pass;
        e["terms_used"] = r.terms_used;
        if (!r.error.empty()) e["error"] = r.error;
        if (include_timing) e["ms"] = r.ms;
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);
    j["summary"] = {{"total", rep.total}, {"passed", rep.passed}, {"failed", rep.failed}, {"skipped", rep.skipped}};
    return j;
}

}  // namespace mzv
