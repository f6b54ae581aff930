#include <gtest/gtest.h>

#include <regex>

#include "cafata/argumentation.hpp"
#include "worked_instance.hpp"

namespace cafata {
namespace {

using testing::breakdown_from_ratings;
using testing::kWorkedMutedB;
using testing::kWorkedRating;
using testing::worked_breakdown;

PredictionBreakdown three_arguments() {
    return breakdown_from_ratings({{"at1", 0.52}, {"at2", -0.11}, {"at3", 0.0}});
}

TEST(BuildTaf, PartitionBySign) {
    const auto taf = build_taf(three_arguments());
    EXPECT_EQ(taf.rec_argument, "rec^i");
    EXPECT_EQ(taf.supporters, (std::set<std::string>{"at1"}));
    EXPECT_EQ(taf.attackers, (std::set<std::string>{"at2"}));
    EXPECT_EQ(taf.neutralizers, (std::set<std::string>{"at3"}));
    ASSERT_EQ(taf.feature_arguments.size(), 3u);
    EXPECT_EQ(taf.feature_arguments[0].feature, "at1");
    EXPECT_DOUBLE_EQ(taf.feature_arguments[0].strength, 0.52);
}

TEST(BuildTaf, AllZeroIsNeutral) {
    const auto taf = build_taf(breakdown_from_ratings({{"a", 0.0}, {"b", 0.0}}));
    EXPECT_EQ(taf.neutralizers.size(), 2u);
    EXPECT_TRUE(taf.supporters.empty());
    EXPECT_TRUE(taf.attackers.empty());
    EXPECT_EQ(taf.sigma_rec, 0.0);
}

TEST(BuildTaf, WorkedInstance) {
    const auto taf = build_taf(worked_breakdown());
    EXPECT_EQ(taf.supporters, (std::set<std::string>{"at_a", "at_c"}));
    EXPECT_EQ(taf.attackers, (std::set<std::string>{"at_b"}));
    EXPECT_NEAR(taf.sigma_rec, kWorkedRating, 1e-9);
}

TEST(BuildTaf, NeutralToleranceWidensNeutralBand) {
    const auto taf = build_taf(three_arguments(), 0.2);
    EXPECT_EQ(taf.neutralizers, (std::set<std::string>{"at2", "at3"}));
    EXPECT_THROW(build_taf(three_arguments(), -1.0), InvalidArgument);
}

TEST(BuildTaf, MatrixFactorizationHasNoStructure) {
    PredictionBreakdown b;
    b.variant = ModelVariant::Mf;
    EXPECT_THROW(build_taf(b), InvalidArgument);
}

TEST(MuteAndPredict, Examples) {
    const auto b = worked_breakdown();
    const double muted = mute_and_predict(b, "at_b");
    EXPECT_NEAR(muted, kWorkedMutedB, 1e-9);
    EXPECT_GT(muted, b.rating_hat);

    const auto fig = three_arguments();
    EXPECT_EQ(mute_and_predict(fig, "at3"), fig.rating_hat);

    const auto single = breakdown_from_ratings({{"only", 0.7}});
    EXPECT_EQ(mute_and_predict(single, "only"), 0.0);

    EXPECT_THROW(mute_and_predict(b, "foreign"), InvalidArgument);
}

TEST(MuteAndPredict, LinearResponseOfWorkedInstance) {
    const auto b = worked_breakdown();
    const double raised = aggregate_with_overrides(b, {{"at_a", b.feature_rating.at("at_a") + 0.1}});
    EXPECT_NEAR(raised - b.rating_hat, 0.0746494, 1e-7);
}

TEST(WeakBalance, HandCases) {
    auto b = breakdown_from_ratings({{"a", 0.54}});
    EXPECT_DOUBLE_EQ(b.rating_hat, 0.54);
    EXPECT_TRUE(weak_balance_violation(b).empty());
    b = breakdown_from_ratings({{"a", 0.0}});
    EXPECT_EQ(b.rating_hat, 0.0);
    EXPECT_TRUE(weak_balance_violation(b).empty());
    b.rating_hat = 0.1;  // corrupted breakdown is caught
    EXPECT_FALSE(weak_balance_violation(b).empty());
}

TEST(WeakBalance, RandomInstances) {
    for (auto v : {ModelVariant::CaFata, ModelVariant::Fata, ModelVariant::AvgCaFata, ModelVariant::AvgFata}) {
        const auto r = check_weak_balance(1000, 21, v);
        EXPECT_EQ(r.passes, 1000u) << (r.counterexamples.empty() ? "" : r.counterexamples.front());
        EXPECT_TRUE(r.ok());
    }
    EXPECT_THROW(check_weak_balance(0, 1), InvalidArgument);
}

TEST(WeakMonotonicity, RandomInstances) {
    for (auto v : {ModelVariant::CaFata, ModelVariant::Fata, ModelVariant::AvgCaFata, ModelVariant::AvgFata}) {
        const auto r = check_weak_monotonicity(1000, 22, v);
        EXPECT_EQ(r.passes, 1000u) << (r.counterexamples.empty() ? "" : r.counterexamples.front());
    }
}

TEST(WeakMonotonicity, CorruptedAggregationIsCaught) {
    auto b = three_arguments();
    // Pretend at2 counts twice as much as its type allows.
    b.features_by_type["t_at1"].push_back("at2");
    EXPECT_FALSE(weak_monotonicity_violation(b, 0.1).empty());
}

TEST(PropertyChecks, OnAModel) {
    auto m = testing::worked_bundle();
    m.catalog.add("solo", "t2", "at_c");
    EXPECT_TRUE(check_weak_balance(m.space, m.catalog, 200, 3).ok());
    EXPECT_TRUE(check_weak_monotonicity(m.space, m.catalog, 200, 3).ok());
    EXPECT_THROW(check_weak_balance(m.space, testing::worked_bundle().catalog, 10, 3), InvalidArgument);
}

TEST(FormatStrength, SignedShortestSixDecimals) {
    EXPECT_EQ(format_strength(0.52), "+0.52");
    EXPECT_EQ(format_strength(-0.11), "-0.11");
    EXPECT_EQ(format_strength(0.0), "0");
    EXPECT_EQ(format_strength(-0.0), "0");
    EXPECT_EQ(format_strength(1e-9), "0");
    EXPECT_EQ(format_strength(0.3574756), "+0.357476");
    EXPECT_EQ(format_strength(2.0), "+2");
}

TEST(ExportDot, ThreeArgumentGolden) {
    const auto dot = export_dot(build_taf(three_arguments()));
    const std::string expected =
        "digraph taf {\n"
        "  rankdir=BT;\n"
        "  \"rec^i\" [shape=box, style=filled, fillcolor=lightgray, label=\"rec^i\\n+0.136667\"];\n"
        "  \"at1\" [shape=ellipse, fontcolor=green];\n"
        "  \"at2\" [shape=ellipse, fontcolor=red];\n"
        "  \"at3\" [shape=ellipse, fontcolor=black];\n"
        "  \"at1\" -> \"rec^i\" [label=\"+0.52\", color=green, fontcolor=green];\n"
        "  \"at2\" -> \"rec^i\" [label=\"-0.11\", color=red, fontcolor=red];\n"
        "  \"at3\" -> \"rec^i\" [label=\"0\", color=black, fontcolor=black];\n"
        "}\n";
    EXPECT_EQ(dot, expected);
    EXPECT_EQ(export_dot(build_taf(three_arguments())), dot);
}

TEST(ExportDot, NoEvidenceGivesLoneClaim) {
    PredictionBreakdown b;
    b.item = "x";
    b.no_evidence = true;
    const auto dot = export_dot(build_taf(b));
    EXPECT_NE(dot.find("\"rec^x\""), std::string::npos);
    EXPECT_EQ(dot.find("->"), std::string::npos);
}

TEST(ExportDot, QuotesAwkwardIds) {
    const auto dot = export_dot(build_taf(breakdown_from_ratings({{"say \"hi\"", 0.5}})));
    EXPECT_NE(dot.find("\"say \\\"hi\\\"\""), std::string::npos);
}

TEST(ExportDot, LabelsRoundTripToSixDecimals) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        RandomInstanceOptions opt;
        opt.max_types = 3;
        const auto inst = random_instance(rng, opt);
        const auto b = predict(inst.space, inst.catalog, inst.user, inst.item, inst.situation, ModelVariant::CaFata);
        const auto dot = export_dot(build_taf(b));
        const std::regex edge("\"([^\"]+)\" -> \"[^\"]+\" \\[label=\"([^\"]+)\"");
        std::size_t seen = 0;
        for (auto it = std::sregex_iterator(dot.begin(), dot.end(), edge); it != std::sregex_iterator(); ++it) {
            const double parsed = std::stod((*it)[2].str());
            EXPECT_NEAR(parsed, b.feature_rating.at((*it)[1].str()), 5e-7);
            ++seen;
        }
        EXPECT_EQ(seen, b.feature_rating.size());
    }
}

TEST(TafJson, CarriesRelations) {
    const auto j = to_json(build_taf(three_arguments()));
    EXPECT_EQ(j.at("schema"), "cafata.taf");
    EXPECT_EQ(j.at("version"), 1);
    EXPECT_EQ(j.at("arguments").size(), 3u);
    EXPECT_EQ(j.at("relations").at("attack"), nlohmann::json::parse(R"([["at2", "rec^i"]])"));
    EXPECT_EQ(j.at("rec").at("id"), "rec^i");
}

}  // namespace
}  // namespace cafata
