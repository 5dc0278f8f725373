#include "mzv/corpus.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using mzv::Expr;
using mzv::Rational;
using mzv::SignedIndex;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

mzv::PrecisionContext make_ctx(double tol = 1e-10)
{
    mzv::PrecisionContext c{40, tol, std::uint64_t{1} << 24};
    c.activate();
    return c;
}

std::pair<std::size_t, std::size_t> error_position(const std::string& text)
{
    try {
        mzv::parse_corpus(text);
    } catch (const mzv::ParseError& e) {
        return {e.line(), e.column()};
    }
    ADD_FAILURE() << "no error for: " << text;
    return {0, 0};
}

Expr random_expr(std::mt19937& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 3), small(1, 5), coin(0, 1);
    switch (pick(rng)) {
    case 0: return Expr::num(Rational(small(rng), small(rng)));
    case 1: {
        std::vector<int> e(static_cast<std::size_t>(small(rng) % 3 + 1));
        for (int& v : e) v = coin(rng) ? small(rng) : -small(rng);
        if (e[0] == 1) e[0] = 2;
        return Expr::sym(SignedIndex(e, coin(rng)));
    }
    case 2: return Expr::sym(coin(rng) ? mzv::ConstantAtom::log2() : mzv::ConstantAtom::pi());
    case 3: return Expr::sym(mzv::ConstantAtom::polylog(small(rng), Rational(1, small(rng) + 1)));
    case 4:
    case 5: {
        Expr s;
        s.kind = Expr::Kind::Sum;
        int n = small(rng) % 3 + 2;
        for (int i = 0; i < n; ++i) {
            s.children.push_back(random_expr(rng, depth - 1));
            s.signs.push_back(coin(rng) ? 1 : -1);
        }
        return s;
    }
    case 6: {
        Expr p;
        p.kind = Expr::Kind::Product;
        int n = small(rng) % 2 + 2;
        for (int i = 0; i < n; ++i) p.children.push_back(random_expr(rng, depth - 1));
        return p;
    }
    default: {
        Expr p;
        p.kind = Expr::Kind::Power;
        p.exponent = static_cast<unsigned>(small(rng) % 3 + 1);
        p.children.push_back(random_expr(rng, depth - 1));
        return p;
    }
    }
}

}  // namespace

TEST(ParseCorpus, SingleRecord)
{
    auto recs = mzv::parse_corpus("id q1 : series F2(2,2;1) = 2*z(2)*z(2,1) + z(3) - z(2)*z(2)\n");
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].id, "q1");
    EXPECT_EQ(recs[0].lhs.kind, Expr::Kind::Series);
    EXPECT_EQ(recs[0].lhs.series, mzv::make_spec("F2", {{2, 2}, {1}}));
    EXPECT_EQ(recs[0].line, 1u);
    EXPECT_EQ(mzv::to_lincomb(recs[0].rhs), mzv::to_lincomb(mzv::parse_expression("2*z(2)*z(2,1) + z(3) - z(2)^2")));
}

TEST(ParseCorpus, EmptyAndCommentOnly)
{
    EXPECT_TRUE(mzv::parse_corpus("").empty());
    EXPECT_TRUE(mzv::parse_corpus("# nothing here\n\n   # still nothing\n").empty());
}

TEST(ParseCorpus, AnnotationsAndContinuationLines)
{
    auto recs = mzv::parse_corpus("id a : series L(2) = z(2,1)\n"
                                  "  @source \"tail over n\" @tol 1e-8\n"
                                  "id b : series W(2,2;1) = 5*z(2)*z(3)\n"
                                  "    - 9*z(5) @skip \"slow\"\n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].source, "tail over n");
    ASSERT_TRUE(recs[0].tolerance_override.has_value());
    EXPECT_DOUBLE_EQ(*recs[0].tolerance_override, 1e-8);
    ASSERT_TRUE(recs[1].skip_reason.has_value());
    EXPECT_EQ(*recs[1].skip_reason, "slow");
    EXPECT_EQ(recs[1].line, 3u);
}

TEST(ParseCorpus, UnclosedParenReportedAtParen)
{
    auto [line, col] = error_position("id bad : series F2(2");
    EXPECT_EQ(line, 1u);
    EXPECT_EQ(col, 19u);
}

TEST(ParseCorpus, ErrorsCarryPositions)
{
    EXPECT_EQ(error_position("id a : series L(2) = z(2,1)\nid a : series L(3) = z(3,1)\n").first, 2u);
    EXPECT_EQ(error_position("id a : series Foo(2) = z(3)").first, 1u);
    EXPECT_EQ(error_position("id a : series L(2) = y(3)").second, 22u);
    EXPECT_EQ(error_position("id a : series L(2) z(2,1)").first, 1u);
    EXPECT_EQ(error_position("\n\nid a : series W(2;1;3) = z(3)").first, 3u);
    EXPECT_THROW(mzv::parse_expression("z(2"), mzv::ParseError);
    EXPECT_THROW(mzv::parse_expression("z(2) +"), mzv::ParseError);
}

TEST(ParseExpression, AtomsAndOperators)
{
    auto ctx = make_ctx(1e-25);
    auto v = mzv::evaluate_expr(mzv::parse_expression("(z(2) - 1/2*ln2^2)*2/3 + Li(2,1/2)"), ctx).value;
    const mzv::Float l = boost::math::constants::ln_two<mzv::Float>(), p = boost::math::constants::pi<mzv::Float>();
    mzv::Float want = (p * p / 6 - l * l / 2) * 2 / 3 + (p * p / 12 - l * l / 2);
    EXPECT_LE(abs(v.value() - want), v.err() + mzv::Float("1e-33"));
    EXPECT_EQ(mzv::to_lincomb(mzv::parse_expression("const(zs62)")),
              mzv::LinComb::symbol(mzv::ConstantAtom::named("zs62")));
    EXPECT_EQ(mzv::to_lincomb(mzv::parse_expression("zs(2,1) - z(2,1) - z(3)")),
              mzv::LinComb::symbol(SignedIndex({2, 1}, true)) - mzv::LinComb::symbol(SignedIndex({2, 1})) -
                  mzv::LinComb::symbol(SignedIndex({3})));
}

TEST(ParseExpression, BuilderArgumentForms)
{
    auto a = mzv::parse_expression("F2(2,3;x=1/2)");
    auto b = mzv::parse_expression("F2(2,3;1/2)");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.series.text(), "F2(2,3;1/2)");
    auto c = mzv::parse_expression("LS(1;3;-)");
    ASSERT_EQ(c.kind, Expr::Kind::Series);
    EXPECT_TRUE(c.series.groups[2][0].sign_token);
}

TEST(Serialize, BundledCorpusRoundTrip)
{
    auto recs = mzv::parse_corpus(slurp(MZV_CORPUS_DIR "/identities.mzv"));
    EXPECT_EQ(recs.size(), 39u);
    auto again = mzv::parse_corpus(mzv::serialize(recs));
    EXPECT_EQ(again, recs);
    EXPECT_EQ(mzv::serialize(again), mzv::serialize(recs));
}

TEST(Serialize, RandomExpressionRoundTrip)
{
    std::mt19937 rng(123);
    for (int t = 0; t < 500; ++t) {
        Expr e = random_expr(rng, 3);
        std::string text = mzv::to_string(e);
        Expr parsed;
        try {
            parsed = mzv::parse_expression(text);
        } catch (const mzv::ParseError& err) {
            ADD_FAILURE() << err.what() << " in " << text;
            continue;
        }
        EXPECT_EQ(mzv::to_lincomb(parsed), mzv::to_lincomb(e)) << text;
        EXPECT_EQ(mzv::parse_expression(mzv::to_string(parsed)), parsed) << text;
        EXPECT_EQ(mzv::to_string(parsed), text);
    }
}

TEST(Serialize, RecordRoundTripWithAnnotations)
{
    mzv::IdentityRecord r;
    r.id = "x-1";
    r.lhs = Expr::of_series(mzv::make_spec("M", {{-2, 3}, {1}}));
    r.rhs = mzv::parse_expression("z(3)*z(-2,1) - z(-2)*z(3,1)");
    r.source = "a \"quoted\" source";
    r.tolerance_override = 1e-9;
    r.skip_reason = "not today";
    auto back = mzv::parse_corpus(mzv::serialize(r));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], r);
}

TEST(VerifyCorpus, EmptyCorpus)
{
    auto rep = mzv::verify_corpus({}, make_ctx(), 4);
    EXPECT_EQ(rep.total, 0u);
    EXPECT_EQ(rep.passed, 0u);
    EXPECT_EQ(rep.failed, 0u);
    EXPECT_EQ(rep.skipped, 0u);
    auto j = mzv::report_json(rep);
    EXPECT_EQ(j["summary"]["total"], 0);
    EXPECT_TRUE(j["results"].empty());
}

TEST(VerifyCorpus, SmallCorpusPasses)
{
    auto rep = mzv::verify_corpus(mzv::parse_corpus(slurp(MZV_TEST_DATA "/small.mzv")), make_ctx(), 2);
    EXPECT_EQ(rep.total, 4u);
    EXPECT_TRUE(rep.all_passed());
    for (const auto& r : rep.results) EXPECT_LE(r.gap, r.err_budget) << r.id;
}

TEST(VerifyCorpus, NegativeControlFailsExactlyThePerturbedId)
{
    auto rep = mzv::verify_corpus(mzv::parse_corpus(slurp(MZV_TEST_DATA "/perturbed.mzv")), make_ctx(), 2);
    ASSERT_EQ(rep.total, 2u);
    EXPECT_EQ(rep.failed, 1u);
    for (const auto& r : rep.results) {
        if (r.id == "weighted") {
            EXPECT_FALSE(r.pass);
            EXPECT_GT(r.gap, mzv::Float("1e-4"));
        } else {
            EXPECT_TRUE(r.pass);
        }
    }
}

TEST(VerifyCorpus, ErrorsBecomeFailedEntries)
{
    auto recs = mzv::parse_corpus("id ok : series L(2) = z(2,1)\n"
                                  "id bad : series F2(1,1;1) = z(3)\n"
                                  "id later : series z(3) = z(2,1) @skip \"dup\"\n");
    auto rep = mzv::verify_corpus(recs, make_ctx(), 3);
    EXPECT_EQ(rep.passed, 1u);
    EXPECT_EQ(rep.failed, 1u);
    EXPECT_EQ(rep.skipped, 1u);
    EXPECT_EQ(rep.results[0].id, "bad");
    EXPECT_FALSE(rep.results[0].error.empty());
}

TEST(VerifyCorpus, ReportIsDeterministicAcrossJobCounts)
{
    auto recs = mzv::parse_corpus(slurp(MZV_CORPUS_DIR "/identities.mzv"));
    auto ctx = make_ctx();
    auto a = mzv::report_json(mzv::verify_corpus(recs, ctx, 1)).dump(2);
    auto b = mzv::report_json(mzv::verify_corpus(recs, ctx, 3)).dump(2);
    auto c = mzv::report_json(mzv::verify_corpus(recs, ctx, 3)).dump(2);
    EXPECT_EQ(a, b);
    EXPECT_EQ(b, c);
}

TEST(VerifyCorpus, ReportSchema)
{
    auto rep = mzv::verify_corpus(mzv::parse_corpus(slurp(MZV_TEST_DATA "/small.mzv")), make_ctx(), 1);
    auto j = mzv::report_json(rep);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["context"]["digits"], 40);
    EXPECT_EQ(j["summary"]["passed"], 4);
    ASSERT_EQ(j["results"].size(), 4u);
    std::vector<std::string> ids;
    for (const auto& r : j["results"]) {
        ids.push_back(r["id"]);
        for (const char* key : {"source", "lhs", "rhs", "gap", "err_budget", "pass", "terms_used"})
            EXPECT_TRUE(r.contains(key)) << key;
        EXPECT_FALSE(r.contains("ms"));
    }
    EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
    EXPECT_TRUE(mzv::report_json(rep, true)["results"][0].contains("ms"));
}

TEST(VerifyCorpus, BundledCorpusFailsOnlyTheMisprints)
{
    auto rep = mzv::verify_corpus(mzv::parse_corpus(slurp(MZV_CORPUS_DIR "/identities.mzv")), make_ctx(), 2);
    std::vector<std::string> failed;
    for (const auto& r : rep.results)
        if (!r.pass) failed.push_back(r.id);
    EXPECT_EQ(failed, (std::vector<std::string>{"ex4-10", "ex4-15a", "ex4-15b"}));
    EXPECT_EQ(rep.passed, 36u);
}
