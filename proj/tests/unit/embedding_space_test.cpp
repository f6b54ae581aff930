#include <gtest/gtest.h>

#include <random>

#include "cafata/embedding_space.hpp"

namespace cafata {
namespace {

TEST(EmbeddingTable, UnknownRowIsReservedZeroVector) {
    EmbeddingTable t("users", 3);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.id(0), std::string(kUnknownId));
    for (double x : t.row(0)) EXPECT_EQ(x, 0.0);
}

TEST(EmbeddingTable, InsertAndLookup) {
    EmbeddingTable t("items", 2);
    const auto idx = t.insert("i1", {1.0, -2.0});
    EXPECT_EQ(idx, 1u);
    EXPECT_EQ(t.index_of("i1"), 1u);
    EXPECT_EQ(t.row("i1")[1], -2.0);
    EXPECT_TRUE(t.contains("i1"));
    EXPECT_FALSE(t.find("i2").has_value());
}

TEST(EmbeddingTable, StrictLookupNamesIdAndTable) {
    EmbeddingTable t("features", 2);
    try {
        t.index_of("ghost");
        FAIL() << "expected UnknownIdError";
    } catch (const UnknownIdError& e) {
        EXPECT_EQ(e.table(), "features");
        EXPECT_EQ(e.id(), "ghost");
        EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
    }
    EXPECT_EQ(t.index_of("ghost", LookupMode::Lenient), EmbeddingTable::unknown_index());
}

TEST(EmbeddingTable, RejectsBadInserts) {
    EmbeddingTable t("types", 2);
    EXPECT_THROW(t.insert("a", {1.0}), InvalidArgument);
    t.insert("a", {1.0, 2.0});
    EXPECT_THROW(t.insert("a", {1.0, 2.0}), InvalidArgument);
    EXPECT_THROW(t.insert("b", {1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
    EXPECT_THROW(t.insert(std::string(kUnknownId), {0.0, 0.0}), InvalidArgument);
    EXPECT_THROW(EmbeddingTable("x", 0), InvalidArgument);
}

TEST(EmbeddingSpace, RejectsSlopeOutsideOpenUnitInterval) {
    EXPECT_THROW(EmbeddingSpace(2, 0.0), InvalidArgument);
    EXPECT_THROW(EmbeddingSpace(2, 1.0), InvalidArgument);
    EXPECT_NO_THROW(EmbeddingSpace(2, 0.01));
}

TEST(EmbeddingSpace, ConditionsAreKeyedByFactor) {
    EmbeddingSpace s(1);
    s.add_condition("daytime", "morning", std::vector<double>{0.4});
    s.add_condition("season", "morning", std::vector<double>{-0.4});
    EXPECT_EQ(s.conditions().row(condition_key("daytime", "morning"))[0], 0.4);
    EXPECT_EQ(s.conditions().row(condition_key("season", "morning"))[0], -0.4);
}

TEST(EmbeddingSpace, RandomRowsAreSeeded) {
    EmbeddingSpace a(4), b(4);
    std::mt19937_64 ra(5), rb(5);
    a.add_random(TableKind::User, "u", ra);
    b.add_random(TableKind::User, "u", rb);
    EXPECT_TRUE(a == b);
}

TEST(ContextualSituation, OneConditionPerFactor) {
    ContextualSituation s;
    s.assign("daytime", "morning");
    EXPECT_THROW(s.assign("daytime", "evening"), InvalidArgument);
    EXPECT_EQ(s.size(), 1u);
}

TEST(ItemFeatureMap, GroupsByTypeAndCollapsesDuplicates) {
    ItemFeatureMap m;
    m.add("i1", "genre", "action");
    m.add("i1", "genre", "comedy");
    m.add("i1", "genre", "comedy");
    m.add("i1", "director", "d7");
    const auto& types = m.types_of("i1");
    ASSERT_EQ(types.size(), 2u);
    EXPECT_EQ(types.at("genre"), (std::set<std::string>{"action", "comedy"}));
    EXPECT_EQ(types.at("director"), (std::set<std::string>{"d7"}));
    EXPECT_TRUE(m.types_of("i2").empty());
}

TEST(ItemFeatureMap, FeatureUnderTwoTypesOfOneItemIsRejected) {
    ItemFeatureMap m;
    m.add("i1", "genre", "x");
    EXPECT_THROW(m.add("i1", "director", "x"), InvalidArgument);
    EXPECT_NO_THROW(m.add("i2", "director", "x"));
}

TEST(ModelVariant, NamesRoundTrip) {
    for (auto v : {ModelVariant::CaFata, ModelVariant::Fata, ModelVariant::AvgCaFata, ModelVariant::AvgFata,
                   ModelVariant::Mf}) {
        EXPECT_EQ(parse_variant(to_string(v)), v);
    }
    EXPECT_THROW(parse_variant("bogus"), InvalidArgument);
}

}  // namespace
}  // namespace cafata
