// mzvtool: verify identity corpora, evaluate expressions, expand stuffles,
// evaluate tail-sum series and catalog formulas.

#include "mzv/mzv.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct NumericOptions {
    unsigned digits = 40;
    double tol = 1e-10;
    std::uint64_t max_n = std::uint64_t{1} << 24;

    void add_to(CLI::App* app)
    {
        app->add_option("--prec", digits, "working precision in decimal digits")->check(CLI::Range(20u, 2000u));
        app->add_option("--tol", tol, "absolute error target");
        app->add_option("--max-n", max_n, "cap on explicit summation terms");
    }
    mzv::PrecisionContext context() const
    {
        mzv::PrecisionContext ctx{digits, tol, max_n};
        ctx.activate();
        return ctx;
    }
};

std::string show(const mzv::Real& v, const mzv::PrecisionContext& ctx)
{
    return mzv::to_decimal(v.value(), static_cast<int>(ctx.working_digits) - 5) + " +/- " +
           mzv::to_scientific(v.err(), 2);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, sep);) out.push_back(part);
    return out;
}

int run_verify(const std::string& file, const NumericOptions& num, unsigned jobs, const std::string& report,
               bool timing, bool quiet)
{
    std::ifstream in(file);
    if (!in) {
        std::cerr << "mzvtool: cannot open " << file << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::vector<mzv::IdentityRecord> records;
    try {
        records = mzv::parse_corpus(buf.str());
    } catch (const mzv::ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return 2;
    }
    auto ctx = num.context();
    auto rep = mzv::verify_corpus(records, ctx, jobs);
    if (!quiet) {
        for (const auto& r : rep.results) {
            if (r.skipped) {
                std::cout << "SKIP " << r.id << "  " << r.error << "\n";
                continue;
            }
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  gap " << mzv::to_scientific(r.gap, 2)
                      << "  budget " << mzv::to_scientific(r.err_budget, 2);
            if (!r.error.empty()) std::cout << "  error: " << r.error;
            std::cout << "\n";
        }
    }
    std::cout << rep.passed << "/" << rep.total << " passed, " << rep.failed << " failed, " << rep.skipped
              << " skipped\n";
    if (!report.empty()) {
        std::ofstream out(report);
        if (!out) {
            std::cerr << "mzvtool: cannot write " << report << "\n";
            return 2;
        }
        out << mzv::report_json(rep, timing).dump(2) << "\n";
    }
    return rep.all_passed() ? 0 : 1;
}

int run_eval(const std::string& text, const NumericOptions& num)
{
    mzv::Expr e;
    try {
        e = mzv::parse_expression(text);
    } catch (const mzv::ParseError& err) {
        std::cerr << "mzvtool: " << err.what() << "\n";
        return 2;
    }
    auto ctx = num.context();
    auto v = mzv::evaluate_expr(e, ctx);
    std::cout << show(v.value, ctx) << "\n";
    return 0;
}

int run_stuffle(const std::string& a, const std::string& b)
{
    auto u = mzv::parse_index(a), v = mzv::parse_index(b);
    auto lc = [](const mzv::SignedIndex& i) {
        return i.star() ? mzv::star_expand(i) : mzv::LinComb::symbol(i);
    };
    std::cout << mzv::to_string(mzv::stuffle(lc(u), lc(v))) << "\n";
    return 0;
}

int run_tails(const std::string& family, const std::vector<std::string>& params, const NumericOptions& num,
              bool list)
{
    if (list) {
        for (const auto& [name, doc] : mzv::builder_families()) std::cout << doc << "\n";
        std::cout << "\ncatalog identities (tails <id> <int params...>):\n";
        for (const auto& e : mzv::formula_catalog())
            std::cout << "  " << e.id << " [" << e.arity << " params; " << e.constraints << "]: " << e.description
                      << "\n";
        return 0;
    }
    if (family.empty()) {
        std::cerr << "mzvtool tails: family or catalog id required (see --list)\n";
        return 2;
    }
    auto ctx = num.context();
    for (const auto& e : mzv::formula_catalog()) {
        if (e.id != family) continue;
        std::vector<int> p;
        for (const auto& s : params) p.push_back(std::stoi(s));
        auto r = mzv::verify_formula(family, p, ctx);
        std::cout << "lhs " << show(r.lhs, ctx) << "\nrhs " << show(r.rhs, ctx) << "\ngap "
                  << mzv::to_scientific(r.gap, 2) << "\n"
                  << (r.pass ? "PASS" : "FAIL") << "\n";
        return r.pass ? 0 : 1;
    }
    // each positional parameter is one ';'-group of ','-separated arguments
    std::string text = family + "(";
    for (std::size_t g = 0; g < params.size(); ++g) text += (g ? ";" : "") + params[g];
    text += ")";
    auto expr = mzv::parse_expression(text);
    auto v = mzv::evaluate_expr(expr, ctx);
    std::cout << expr.series.text() << " = " << show(v.value, ctx) << "  (N = " << v.terms_used << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multiple zeta values and zeta-tail series"};
    app.require_subcommand(1);

    NumericOptions num;

    auto* verify = app.add_subcommand("verify", "verify every record of an identity corpus");
    std::string file, report;
    unsigned jobs = 1;
    bool timing = false, quiet = false;
    verify->add_option("file", file, "corpus file")->required();
    num.add_to(verify);
    verify->add_option("--jobs", jobs, "parallel workers")->check(CLI::Range(1u, 256u));
    verify->add_option("--report", report, "write a JSON report");
    verify->add_flag("--timing", timing, "include per-record milliseconds in the report");
    verify->add_flag("--quiet", quiet, "print only the summary line");

    auto* eval = app.add_subcommand("eval", "evaluate an expression");
    std::string expr;
    eval->add_option("expr", expr, "expression, e.g. \"z(2,1)\" or \"W(2,2;1)\"")->required();
    num.add_to(eval);

    auto* stuffle = app.add_subcommand("stuffle", "quasi-shuffle product of two indices");
    std::string ia, ib;
    stuffle->add_option("u", ia)->required();
    stuffle->add_option("v", ib)->required();

    auto* tails = app.add_subcommand("tails", "evaluate a series builder or a catalog formula");
    std::string family;
    std::vector<std::string> params;
    bool list = false;
    tails->add_option("family", family, "builder family or catalog id");
    tails->add_option("params", params, "argument groups, e.g. 2,3 1");
    tails->add_flag("--list", list, "list builder families and catalog ids");
    num.add_to(tails);
    tails->allow_extras(false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) return run_verify(file, num, jobs, report, timing, quiet);
        if (*eval) return run_eval(expr, num);
        if (*stuffle) return run_stuffle(ia, ib);
        if (*tails) return run_tails(family, params, num, list);
    } catch (const std::exception& e) {
        std::cerr << "mzvtool: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
