#include <gtest/gtest.h>

#include "cafata/explanation.hpp"
#include "worked_instance.hpp"

namespace cafata {
namespace {

using testing::breakdown_from_ratings;
using testing::worked_breakdown;

TEST(ClassifyScenario, Thresholds) {
    auto b = breakdown_from_ratings({{"a", -0.8}, {"b", 0.0}});
    EXPECT_NEAR(b.rating_hat, -0.4, 1e-15);
    EXPECT_EQ(classify_scenario(b), Scenario::NotRecommended);
    EXPECT_EQ(classify_scenario(worked_breakdown()), Scenario::StrongRecommendation);
}

TEST(ClassifyScenario, NegativeRunnerUpMakesItWeak) {
    auto b = breakdown_from_ratings({{"a", 1.5}, {"b", -0.2}});
    ASSERT_GE(b.rating_hat, 0.2);
    EXPECT_EQ(classify_scenario(b), Scenario::WeakRecommendation);
}

TEST(ClassifyScenario, BetweenThresholdsIsWeak) {
    EXPECT_EQ(classify_scenario(breakdown_from_ratings({{"a", 0.1}, {"b", 0.05}})), Scenario::WeakRecommendation);
    EXPECT_EQ(classify_scenario(breakdown_from_ratings({{"a", 0.0}})), Scenario::WeakRecommendation);
}

TEST(ClassifyScenario, ThresholdPreconditions) {
    const auto b = worked_breakdown();
    EXPECT_THROW(classify_scenario(b, -0.1, -0.2), InvalidArgument);
    EXPECT_THROW(classify_scenario(b, 0.3, 0.1), InvalidArgument);
}

TEST(GenerateExplanation, WorkedInstanceStrong) {
    const auto e = generate_explanation(worked_breakdown(), Scenario::StrongRecommendation);
    EXPECT_EQ(e.at1, "at_a");
    EXPECT_EQ(e.at2, "at_c");
    EXPECT_EQ(e.cd, "cd1");
    EXPECT_EQ(e.rendered, "When cd1, we recommend you this item because you like at_a and at_c.");
}

TEST(GenerateExplanation, WeakPicksBestAndWorst) {
    const auto e = generate_explanation(worked_breakdown(), Scenario::WeakRecommendation);
    EXPECT_EQ(e.at1, "at_a");
    EXPECT_EQ(e.at2, "at_b");
    EXPECT_EQ(e.rendered, "When cd1, we recommend you this item because you like at_a although you dislike at_b.");
}

TEST(GenerateExplanation, NotRecommendedPicksTwoWorst) {
    const auto b = breakdown_from_ratings({{"x", -0.3}, {"y", -0.5}, {"z", 0.1}});
    const auto e = generate_explanation(b, Scenario::NotRecommended);
    EXPECT_EQ(e.at1, "y");
    EXPECT_EQ(e.at2, "x");
    EXPECT_FALSE(e.cd.has_value());
    EXPECT_EQ(e.rendered, "We do not recommend you this item because you dislike y and x.");
}

TEST(GenerateExplanation, SingleFeatureDegradesGracefully) {
    const auto b = breakdown_from_ratings({{"only", 0.6}});
    EXPECT_EQ(generate_explanation(b, Scenario::StrongRecommendation).rendered,
              "We recommend you this item because you like only.");
    EXPECT_EQ(generate_explanation(b, Scenario::WeakRecommendation).rendered,
              "We recommend you this item because you like only.");
    EXPECT_EQ(generate_explanation(b, Scenario::NotRecommended).rendered,
              "We do not recommend you this item because you dislike only.");
}

TEST(GenerateExplanation, TiesGoToSmallestId) {
    const auto b = breakdown_from_ratings({{"b", 0.4}, {"a", 0.4}, {"c", 0.4}});
    const auto e = generate_explanation(b, Scenario::StrongRecommendation);
    EXPECT_EQ(e.at1, "a");
    EXPECT_EQ(e.at2, "b");
    EXPECT_EQ(generate_explanation(b, Scenario::NotRecommended).at1, "a");
}

TEST(GenerateExplanation, ConditionOfMostImportantFactor) {
    auto b = worked_breakdown();
    b.situation = {};
    b.situation.assign("company", "friends");
    b.situation.assign("daytime", "night");
    b.factor_importance = {{"company", 0.3}, {"daytime", 0.7}};
    EXPECT_EQ(most_influential_condition(b), "night");
    b.factor_importance = {{"company", 0.5}, {"daytime", 0.5}};
    EXPECT_EQ(most_influential_condition(b), "friends");
}

TEST(GenerateExplanation, DisplayNamesFallBackToIds) {
    const DisplayNames names{{"at_a", "action movies"}, {"cd1", "in the morning"}};
    const auto e = generate_explanation(worked_breakdown(), Scenario::StrongRecommendation, names);
    EXPECT_EQ(e.rendered, "When in the morning, we recommend you this item because you like action movies and at_c.");
    EXPECT_EQ(e.at1, "at_a");
}

TEST(GenerateExplanation, RenderingDistinguishesSlots) {
    const auto b1 = breakdown_from_ratings({{"p", 0.9}, {"q", 0.5}});
    const auto b2 = breakdown_from_ratings({{"p", 0.5}, {"q", 0.9}});
    EXPECT_NE(generate_explanation(b1, Scenario::StrongRecommendation).rendered,
              generate_explanation(b2, Scenario::StrongRecommendation).rendered);
}

TEST(GenerateExplanation, FeaturelessBreakdownIsError) {
    PredictionBreakdown b;
    b.no_evidence = true;
    EXPECT_THROW(generate_explanation(b, Scenario::WeakRecommendation), InvalidArgument);
}

TEST(GenerateExplanation, SlotOptimality) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 300; ++t) {
        RandomInstanceOptions opt;
        opt.max_types = 3;
        const auto inst = random_instance(rng, opt);
        const auto b = predict(inst.space, inst.catalog, inst.user, inst.item, inst.situation, ModelVariant::CaFata);
        double lo = 1e300, hi = -1e300;
        for (const auto& [_, p] : b.feature_rating) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        EXPECT_EQ(b.feature_rating.at(generate_explanation(b, Scenario::StrongRecommendation).at1), hi);
        EXPECT_EQ(b.feature_rating.at(generate_explanation(b, Scenario::NotRecommended).at1), lo);
    }
}

TEST(ExplanationJson, Fields) {
    const auto j = to_json(generate_explanation(worked_breakdown(), Scenario::StrongRecommendation));
    EXPECT_EQ(j.at("scenario"), "SR");
    EXPECT_EQ(j.at("at2"), "at_c");
    EXPECT_EQ(j.at("cd"), "cd1");
}

}  // namespace
}  // namespace cafata
