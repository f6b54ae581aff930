#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "cafata/data.hpp"

namespace cafata {
namespace {

InteractionTable parse(const std::string& text) {
    std::istringstream in(text);
    return parse_interactions(in);
}

ItemFeatureMap parse_features(const std::string& text) {
    std::istringstream in(text);
    return parse_item_features(in);
}

std::vector<RawInteraction> pairs(const std::vector<std::pair<std::string, std::string>>& ui) {
    std::vector<RawInteraction> rows;
    for (const auto& [u, i] : ui) rows.push_back({u, i, 1.0, {}});
    return rows;
}

std::vector<RawInteraction> numbered(std::size_t n) {
    std::vector<RawInteraction> rows;
    for (std::size_t k = 0; k < n; ++k) rows.push_back({"u" + std::to_string(k), "i", static_cast<double>(k), {}});
    return rows;
}

TEST(LoadInteractions, SingleRow) {
    const auto t = parse("user_id,item_id,rating,daytime\nu1,i1,3.0,morning\n");
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].user, "u1");
    EXPECT_EQ(t.rows[0].item, "i1");
    EXPECT_EQ(t.rows[0].rating, 3.0);
    EXPECT_EQ(t.rows[0].situation.assignments.at("daytime"), "morning");
    EXPECT_EQ(t.schema, (FactorSchema{{"daytime", {"morning"}}}));
    EXPECT_EQ(t.factors, (std::vector<std::string>{"daytime"}));
}

TEST(LoadInteractions, EmptyCellBecomesUnknownCondition) {
    const auto t = parse("user_id,item_id,rating,daytime\nu1,i1,3,\n");
    EXPECT_EQ(t.rows[0].situation.assignments.at("daytime"), "unknown:daytime");
    EXPECT_TRUE(t.schema.at("daytime").count("unknown:daytime"));
}

TEST(LoadInteractions, ColumnOrderAndQuotingAndWhitespace) {
    const auto t = parse("rating,companion,item_id,user_id\r\n 4.5 ,\"with, friends\",i9,u3\r\n\n");
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].user, "u3");
    EXPECT_EQ(t.rows[0].rating, 4.5);
    EXPECT_EQ(t.rows[0].situation.assignments.at("companion"), "with, friends");
}

TEST(LoadInteractions, NonNumericRatingNamesRow) {
    try {
        parse("user_id,item_id,rating\nu1,i1,abc\n");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("abc"), std::string::npos);
        EXPECT_NE(msg.find("row 2"), std::string::npos);
    }
}

TEST(LoadInteractions, StructuralErrors) {
    EXPECT_THROW(parse(""), DataError);
    EXPECT_THROW(parse("user_id,rating\nu1,3\n"), DataError);
    EXPECT_THROW(parse("user_id,item_id,rating\nu1,i1\n"), DataError);
    EXPECT_THROW(parse("user_id,item_id,rating\n,i1,3\n"), DataError);
    EXPECT_THROW(parse("user_id,item_id,rating\nu1,i1,inf\n"), DataError);
    try {
        parse("user_id,rating\nu1,3\n");
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("item_id"), std::string::npos);
    }
}

TEST(LoadInteractions, MissingFileNamesPath) {
    try {
        load_interactions("/nonexistent/interactions.csv");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/interactions.csv"), std::string::npos);
    }
}

TEST(LoadItemFeatures, GroupsRows) {
    const auto c = parse_features(
        "item_id,feature_type,feature_value\ni1,genre,action\ni1,genre,comedy\ni1,director,d7\n");
    const auto& types = c.types_of("i1");
    EXPECT_EQ(types.at("genre"), (std::set<std::string>{"action", "comedy"}));
    EXPECT_EQ(types.at("director"), (std::set<std::string>{"d7"}));
}

TEST(LoadItemFeatures, DuplicatesAndEmpty) {
    const auto a = parse_features("item_id,feature_type,feature_value\ni1,genre,action\n");
    const auto b = parse_features("item_id,feature_type,feature_value\ni1,genre,action\ni1,genre,action\n");
    EXPECT_TRUE(a == b);
    EXPECT_TRUE(parse_features("item_id,feature_type,feature_value\n").empty());
}

TEST(LoadItemFeatures, Errors) {
    EXPECT_THROW(parse_features("item_id,feature_value\ni1,x\n"), DataError);
    EXPECT_THROW(parse_features("item_id,feature_type,feature_value\ni1,,x\n"), DataError);
    EXPECT_THROW(parse_features("item_id,feature_type,feature_value\ni1,genre,x\ni1,director,x\n"), DataError);
}

TEST(KCore, KOneIsIdentity) {
    const auto rows = pairs({{"u1", "i1"}, {"u2", "i2"}});
    EXPECT_EQ(k_core_filter(rows, 1).size(), 2u);
    EXPECT_THROW(k_core_filter(rows, 0), InvalidArgument);
}

TEST(KCore, CascadeEmptiesSet) {
    EXPECT_TRUE(k_core_filter(pairs({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i1"}}), 2).empty());
}

TEST(KCore, CompleteBipartiteSurvives) {
    const auto rows = pairs({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i1"}, {"u2", "i2"}});
    EXPECT_EQ(k_core_filter(rows, 2).size(), 4u);
}

TEST(KCore, UsersOnlyKeepsRareItems) {
    const auto rows = pairs({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i1"}});
    const auto out = k_core_filter(rows, 2, KCoreMode::UsersOnly);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].user, "u1");
    EXPECT_EQ(out[1].item, "i2");
}

TEST(KCore, FixedPointProperty) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> pick(0, 14);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, std::string>> ui;
        for (int n = 0; n < 120; ++n) ui.emplace_back("u" + std::to_string(pick(rng)), "i" + std::to_string(pick(rng)));
        for (std::size_t k : {2u, 3u, 5u}) {
            const auto out = k_core_filter(pairs(ui), k);
            std::map<std::string, std::size_t> du, di;
            for (const auto& r : out) {
                ++du[r.user];
                ++di[r.item];
            }
            for (const auto& [_, d] : du) ASSERT_GE(d, k);
            for (const auto& [_, d] : di) ASSERT_GE(d, k);
        }
    }
}

TEST(Scale, OneToFive) {
    const RatingScale s{1.0, 5.0};
    const std::vector<double> raw{3.0, 5.0, 1.0};
    EXPECT_EQ(scale_ratings(raw, s, ScaleDirection::ToNormalized), (std::vector<double>{0.0, 1.0, -1.0}));
    const std::vector<double> norm{0.0, 1.0, -1.0};
    EXPECT_EQ(scale_ratings(norm, s, ScaleDirection::ToOriginal), raw);
}

TEST(Scale, FrappeRange) {
    const RatingScale s{0.0, 4.46};
    EXPECT_NEAR(s.to_normalized(2.23), 0.0, 1e-15);
}

TEST(Scale, Errors) {
    const std::vector<double> v{1.0};
    EXPECT_THROW(scale_ratings(v, RatingScale{2.0, 2.0}, ScaleDirection::ToNormalized), InvalidArgument);
    EXPECT_THROW(RatingScale({1.0, 5.0}).to_normalized(6.0), InvalidArgument);
}

TEST(LogTransform, Log1p) {
    EXPECT_EQ(log_transform(0.0), 0.0);
    EXPECT_NEAR(log_transform(std::exp(1.0) - 1.0), 1.0, 1e-15);
    EXPECT_THROW(log_transform(-1.0), InvalidArgument);
}

TEST(Split, Sizes) {
    auto p = split(numbered(10), 0);
    EXPECT_EQ(p.train.size(), 8u);
    EXPECT_EQ(p.val.size(), 1u);
    EXPECT_EQ(p.test.size(), 1u);
    p = split(numbered(95), 0);
    EXPECT_EQ(p.train.size(), 76u);
    EXPECT_EQ(p.val.size(), 9u);
    EXPECT_EQ(p.test.size(), 10u);
    EXPECT_THROW(split(numbered(9), 0), InvalidArgument);
}

TEST(Split, SameSeedSamePartitions) {
    const auto a = split(numbered(50), 7);
    const auto b = split(numbered(50), 7);
    for (std::size_t k = 0; k < a.train.size(); ++k) EXPECT_EQ(a.train[k].user, b.train[k].user);
    const auto c = split(numbered(50), 8);
    bool differs = false;
    for (std::size_t k = 0; k < a.train.size(); ++k) differs |= a.train[k].user != c.train[k].user;
    EXPECT_TRUE(differs);
}

TEST(Split, ExhaustiveAndDisjointForRandomSizes) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> size(10, 2000);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = size(rng);
        const auto p = split(numbered(n), rng());
        ASSERT_EQ(p.train.size(), n * 8 / 10);
        ASSERT_EQ(p.train.size() + p.val.size(), n * 9 / 10);
        std::set<std::string> seen;
        for (const auto* part : {&p.train, &p.val, &p.test}) {
            for (const auto& r : *part) ASSERT_TRUE(seen.insert(r.user).second);
        }
        ASSERT_EQ(seen.size(), n);
    }
}

TEST(Ingest, Pipeline) {
    auto table = parse(
        "user_id,item_id,rating,daytime\n"
        "u1,i1,3,morning\nu1,i2,0,night\nu2,i1,8,morning\nu2,i2,1,night\nu3,i1,2,night\n"
        "u3,i2,4,morning\nu4,i1,5,morning\nu4,i2,6,night\nu5,i1,7,night\nu5,i2,2,morning\nu6,i3,1,night\n");
    ItemFeatureMap catalog;
    catalog.add("i1", "genre", "a");
    catalog.add("i2", "genre", "b");
    IngestOptions opt;
    opt.log_transform = true;
    opt.k_core = 2;
    opt.seed = 3;
    IngestReport rep;
    const auto ds = ingest(table, catalog, opt, &rep);
    EXPECT_EQ(rep.loaded, 11u);
    EXPECT_EQ(rep.dropped_uncatalogued, 1u);
    EXPECT_EQ(rep.dropped_k_core, 0u);
    EXPECT_EQ(ds.train.size() + ds.val.size() + ds.test.size(), 10u);
    EXPECT_DOUBLE_EQ(ds.scale.min, 0.0);
    EXPECT_DOUBLE_EQ(ds.scale.max, std::log1p(8.0));
    EXPECT_NO_THROW(ds.validate());

    opt.scale = RatingScale{0.0, 1.0};
    EXPECT_THROW(ingest(table, catalog, opt), InvalidArgument);
}

TEST(Dataset, ValidateCatchesUndeclaredCondition) {
    Dataset ds;
    ds.scale = {1.0, 5.0};
    ds.schema = {{"daytime", {"morning"}}};
    RawInteraction r{"u", "i", 3.0, {}};
    r.situation.assign("daytime", "noon");
    ds.train.push_back(r);
    EXPECT_THROW(ds.validate(), InvalidArgument);
}

}  // namespace
}  // namespace cafata
