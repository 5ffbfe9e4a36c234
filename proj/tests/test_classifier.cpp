#include <advmap/classifier.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace advmap;
using fixture::features;
using fixture::make_set;
using fixture::separable20;
using fixture::signs;

namespace {

double training_error(const ClassifierModel& m, const LabeledImageSet& s)
{
    int wrong = 0;
    for (const auto& it : s.items)
        wrong += predict(m, it.features).label != it.label ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(s.size());
}

} // namespace

TEST(QpOracle, ProjectionIsFeasible)
{
    const std::vector<double> v{0.5, 2.0, -1.0, 0.7};
    const std::vector<double> y{1, 1, -1, -1};
    const auto a = oracle::project(v, y, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_GE(a[i], 0.0);
        EXPECT_LE(a[i], 1.0);
        s += y[i] * a[i];
    }
    EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(Train, TwoPointsGiveMaximalMargin)
{
    // Hard margin on two points: w = 2 (x+ - x-) / |x+ - x-|^2, margin = |x+ - x-|.
    const auto data = make_set({{2.0, 1.0}, {0.0, 0.0}}, {Label::FP, Label::DP});
    SvmHyperParams hp;
    hp.C = 100.0;
    hp.tol = 1e-9;
    const ClassifierModel m = train(data, hp);
    EXPECT_NEAR(m.weights[0], 0.8, 1e-9);
    EXPECT_NEAR(m.weights[1], 0.4, 1e-9);
    EXPECT_NEAR(m.bias, -1.0, 1e-9);
    EXPECT_EQ(training_error(m, data), 0.0);
    const double norm = std::hypot(m.weights[0], m.weights[1]);
    EXPECT_NEAR(2.0 / norm, std::sqrt(5.0), 1e-9);
}

TEST(Train, XorIsNotLinearlySeparable)
{
    const auto data = make_set({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {Label::FP, Label::FP, Label::DP, Label::DP});
    EXPECT_GE(training_error(train(data), data), 0.25);
}

TEST(Train, MatchesQpOracleOnSeparableFixtures)
{
    for (std::uint64_t seed : {1, 2, 3}) {
        for (double C : {1.0, 10.0}) {
            const LabeledImageSet data = separable20(seed);
            SvmHyperParams hp;
            hp.C = C;
            const SvmSolution sol = train_detailed(data, hp);
            ASSERT_TRUE(sol.converged);
            const auto ref = oracle::svm_dual(features(data), signs(data), C);
            EXPECT_GT(oracle::cosine(sol.model.weights, ref.w), 1.0 - 1e-3) << "seed " << seed << " C " << C;
            EXPECT_EQ(training_error(sol.model, data), 0.0);
            for (double a : sol.alpha) {
                EXPECT_GE(a, 0.0);
                EXPECT_LE(a, C);
            }
            EXPECT_LT(kkt_gap(data, sol.alpha, C), hp.tol);
        }
    }
}

TEST(Train, TighterToleranceApproachesOracle)
{
    const LabeledImageSet data = separable20(7);
    SvmHyperParams hp;
    hp.tol = 1e-10;
    hp.max_passes = 10000;
    const SvmSolution sol = train_detailed(data, hp);
    const auto ref = oracle::svm_dual(features(data), signs(data), hp.C);
    for (std::size_t k = 0; k < ref.w.size(); ++k)
        EXPECT_NEAR(sol.model.weights[k], ref.w[k], 1e-6);
}

TEST(Train, ErrorsOnBadInput)
{
    try {
        train(make_set({{1.0}, {2.0}}, {Label::FP, Label::FP}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::single_class_data);
    }
    try {
        train(make_set({{1.0}, {2.0, 1.0}}, {Label::FP, Label::DP}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
    EXPECT_THROW(train(make_set({{1.0}}, {Label::FP})), Error);
    SvmHyperParams hp;
    hp.C = 0.0;
    EXPECT_THROW(train(make_set({{1.0}, {2.0}}, {Label::FP, Label::DP}), hp), Error);
}

TEST(Train, IterationCapReportsNonConvergence)
{
    SvmHyperParams hp;
    hp.max_passes = 1;
    hp.tol = 1e-12;
    const SvmSolution sol = train_detailed(separable20(4), hp);
    EXPECT_LE(sol.iterations, 20);
}

TEST(Train, SameSeedIsBitIdentical)
{
    const LabeledImageSet data = separable20(5);
    SvmHyperParams hp;
    hp.seed = 17;
    EXPECT_EQ(train(data, hp), train(data, hp));
}

TEST(Predict, ZeroScoreIsDetour)
{
    ClassifierModel m;
    m.weights = {0.0, 0.0};
    const Prediction p = predict(m, {3.0, -1.0});
    EXPECT_EQ(p.score, 0.0);
    EXPECT_EQ(p.label, Label::DP);
}

TEST(Predict, ReflectionThroughBoundaryFlipsClass)
{
    ClassifierModel m;
    m.weights = {1.0, 2.0};
    m.bias = -1.0;
    const std::vector<double> x{2.0, 1.0}; // score 3
    // x' = x - 2 * score / |w|^2 * w lands on the mirror side with score -3.
    const double s = m.score(x);
    const double k = 2.0 * s / 5.0;
    const std::vector<double> r{x[0] - k * 1.0, x[1] - k * 2.0};
    EXPECT_EQ(predict(m, x).label, Label::FP);
    EXPECT_NEAR(m.score(r), -s, 1e-12);
    EXPECT_EQ(predict(m, r).label, Label::DP);
}

TEST(Predict, PositiveScalingKeepsClasses)
{
    const LabeledImageSet data = separable20(6);
    ClassifierModel m = train(data);
    ClassifierModel scaled = m;
    for (double& w : scaled.weights)
        w *= 3.5;
    scaled.bias *= 3.5;
    for (const auto& it : data.items)
        EXPECT_EQ(predict(m, it.features).label, predict(scaled, it.features).label);
}

TEST(Predict, DimensionMismatch)
{
    ClassifierModel m;
    m.weights = {1.0};
    EXPECT_THROW(predict(m, {1.0, 2.0}), Error);
}

TEST(Split, SevenThree)
{
    std::vector<int> items(10);
    std::iota(items.begin(), items.end(), 0);
    auto [train_part, test_part] = split(items, 0.7, 3);
    EXPECT_EQ(train_part.size(), 7u);
    EXPECT_EQ(test_part.size(), 3u);
    auto [again_train, again_test] = split(items, 0.7, 3);
    EXPECT_EQ(train_part, again_train);
    EXPECT_EQ(test_part, again_test);
    std::vector<int> joined = train_part;
    joined.insert(joined.end(), test_part.begin(), test_part.end());
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(joined, items);
    EXPECT_THROW(split(items, 1.0, 0), Error);
    EXPECT_THROW(split(items, 0.0, 0), Error);
}

TEST(Split, LabeledSetKeepsProvenance)
{
    LabeledImageSet data = separable20(2);
    data.provenance = "ds-1";
    auto [a, b] = split(data, 0.7, 1);
    EXPECT_EQ(a.size(), 14u);
    EXPECT_EQ(b.size(), 6u);
    EXPECT_EQ(a.provenance, "ds-1");
    EXPECT_EQ(b.provenance, "ds-1");
}

TEST(ModelFile, RoundTripsExactly)
{
    ClassifierModel m = train(separable20(9));
    m.weights.push_back(0.1);  // shortest round-trip formatting
    m.weights.push_back(-1e-300);
    std::stringstream ss;
    write_model(ss, m);
    EXPECT_EQ(read_model(ss), m);
}

TEST(ModelFile, RejectsMalformedInput)
{
    std::istringstream bad_magic("hello\n");
    EXPECT_THROW(read_model(bad_magic), ParseError);
    std::ostringstream os;
    ClassifierModel m;
    m.weights = {1.0, 2.0};
    write_model(os, m);
    std::string text = os.str();
    std::istringstream truncated(text.substr(0, text.size() - 2));
    try {
        read_model(truncated);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 11u);
    }
}

TEST(ContentHash, DependsOnEveryItem)
{
    LabeledImageSet a = separable20(1);
    LabeledImageSet b = a;
    EXPECT_EQ(content_hash(a), content_hash(b));
    b.items[3].label = b.items[3].label == Label::FP ? Label::DP : Label::FP;
    EXPECT_NE(content_hash(a), content_hash(b));
}
