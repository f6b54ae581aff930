#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cafata/io.hpp"
#include "cafata/synthetic.hpp"
#include "cafata/training.hpp"
#include "worked_instance.hpp"

namespace cafata {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("cafata_io_" + name);
    fs::remove_all(dir);
    return dir;
}

TEST(ModelIo, RoundTripPredictsBitForBit) {
    PlantedConfig pc;
    pc.users = 25;
    pc.items = 15;
    pc.interactions = 600;
    const auto pd = make_planted_data(pc);
    TrainingConfig cfg;
    cfg.dimension = 5;
    cfg.max_epochs = 3;
    cfg.learning_rate = 1e-2;
    const auto res = train(pd.dataset, cfg);
    const ModelBundle bundle{res.space, pd.dataset.catalog, pd.dataset.schema, pd.dataset.factors, pd.dataset.scale,
                             cfg.variant};

    const auto path = scratch_dir("roundtrip") / "nested" / "model.json";
    save_model(path, bundle);
    const auto loaded = load_model(path);
    EXPECT_TRUE(loaded.space == bundle.space);
    EXPECT_TRUE(loaded.catalog == bundle.catalog);
    EXPECT_EQ(loaded.schema, bundle.schema);
    EXPECT_EQ(loaded.factors, bundle.factors);
    EXPECT_EQ(loaded.scale, bundle.scale);
    EXPECT_EQ(loaded.variant, bundle.variant);
    for (const auto& r : pd.dataset.test) {
        const auto a = predict(bundle.space, bundle.catalog, r.user, r.item, r.situation, bundle.variant,
                               LookupMode::Lenient);
        const auto b = predict(loaded.space, loaded.catalog, r.user, r.item, r.situation, loaded.variant,
                               LookupMode::Lenient);
        ASSERT_EQ(a.rating_hat, b.rating_hat);
    }
}

TEST(ModelIo, DocumentShape) {
    const auto j = to_json(testing::worked_bundle());
    EXPECT_EQ(j.at("format"), "cafata-model");
    EXPECT_EQ(j.at("version"), 1);
    EXPECT_EQ(j.at("dimension"), 1);
    EXPECT_EQ(j.at("tables").at("users").at("u1"), nlohmann::json::parse("[0.5]"));
    EXPECT_EQ(j.at("tables").at("conditions").at("cf1=cd1"), nlohmann::json::parse("[0.4]"));
    EXPECT_FALSE(j.at("tables").at("users").contains("<unk>"));
}

TEST(ModelIo, SerializationIsStable) {
    const auto a = to_json(testing::worked_bundle()).dump(1);
    const auto b = to_json(model_from_json(nlohmann::json::parse(a))).dump(1);
    EXPECT_EQ(a, b);
}

TEST(ModelIo, Errors) {
    try {
        load_model("/nonexistent/model.json");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/model.json"), std::string::npos);
    }
    const auto dir = scratch_dir("errors");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << "{not json";
    EXPECT_THROW(load_model(dir / "bad.json"), DataError);

    auto j = to_json(testing::worked_bundle());
    j["version"] = 99;
    EXPECT_THROW(model_from_json(j), DataError);
    j = to_json(testing::worked_bundle());
    j["format"] = "something-else";
    EXPECT_THROW(model_from_json(j), DataError);
    j = to_json(testing::worked_bundle());
    j["tables"]["users"]["u1"] = {1.0, 2.0};
    EXPECT_THROW(model_from_json(j), InvalidArgument);
    j = to_json(testing::worked_bundle());
    j.erase("dimension");
    EXPECT_THROW(model_from_json(j), DataError);
}

TEST(DatasetIo, RoundTrip) {
    PlantedConfig pc;
    pc.users = 10;
    pc.items = 8;
    pc.interactions = 100;
    const auto ds = make_planted_data(pc).dataset;
    const auto path = scratch_dir("dataset") / "dataset.json";
    save_dataset(path, ds);
    const auto back = load_dataset(path);
    EXPECT_EQ(back.train, ds.train);
    EXPECT_EQ(back.val, ds.val);
    EXPECT_EQ(back.test, ds.test);
    EXPECT_TRUE(back.catalog == ds.catalog);
    EXPECT_EQ(back.schema, ds.schema);
    EXPECT_EQ(back.scale, ds.scale);
}

}  // namespace
}  // namespace cafata
