#ifndef CAFATA_IO_HPP
#define CAFATA_IO_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cafata/data.hpp"
#include "cafata/embedding_space.hpp"
#include "cafata/errors.hpp"

namespace cafata {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kDatasetFormatVersion = 1;

/// Everything `predict` needs, as stored in a model file.
struct ModelBundle {
    EmbeddingSpace space;
    ItemFeatureMap catalog;
    FactorSchema schema;
    std::vector<std::string> factors;  // column order of the source data
    RatingScale scale;
    ModelVariant variant = ModelVariant::CaFata;
};

namespace detail {

inline nlohmann::json catalog_to_json(const ItemFeatureMap& catalog) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [item, types] : catalog.items()) {
        for (const auto& [type, feats] : types) j[item][type] = feats;
    }
    return j;
}

inline ItemFeatureMap catalog_from_json(const nlohmann::json& j) {
    ItemFeatureMap catalog;
    for (const auto& [item, types] : j.items()) {
        for (const auto& [type, feats] : types.items()) {
            for (const auto& f : feats) catalog.add(item, type, f.get<std::string>());
        }
    }
    return catalog;
}

inline nlohmann::json interactions_to_json(const std::vector<RawInteraction>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"user", r.user}, {"item", r.item}, {"rating", r.rating},
                       {"context", r.situation.assignments}});
    }
    return arr;
}

inline std::vector<RawInteraction> interactions_from_json(const nlohmann::json& arr) {
    std::vector<RawInteraction> rows;
    for (const auto& j : arr) {
        RawInteraction r;
        r.user = j.at("user").get<std::string>();
        r.item = j.at("item").get<std::string>();
        r.rating = j.at("rating").get<double>();
        r.situation.assignments = j.at("context").get<std::map<std::string, std::string>>();
        rows.push_back(std::move(r));
    }
    return rows;
}

inline void check_format(const nlohmann::json& j, const char* format, int version) {
    if (j.value("format", std::string()) != format) {
        throw DataError(std::string("not a ") + format + " document");
    }
    if (j.value("version", 0) != version) {
        throw DataError(std::string("unsupported ") + format + " version " +
                        std::to_string(j.value("version", 0)));
    }
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace detail

/// {format, version, dimension, leaky_slope, seed, variant, scale, factors,
///  schema, catalog, tables: {users|factors|conditions|types|features|items:
///  {id: [..]}}}. The reserved unknown rows are implicit.
inline nlohmann::json to_json(const ModelBundle& m) {
    nlohmann::json j;
    j["format"] = "cafata-model";
    j["version"] = kModelFormatVersion;
    j["dimension"] = m.space.dim();
    j["leaky_slope"] = m.space.leaky_slope();
    j["seed"] = m.space.seed();
    j["variant"] = to_string(m.variant);
    j["scale"] = {{"min", m.scale.min}, {"max", m.scale.max}};
    j["factors"] = m.factors;
    j["schema"] = m.schema;
    j["catalog"] = detail::catalog_to_json(m.catalog);
    auto& tables = j["tables"];
    for (auto kind : kAllTables) {
        const auto& table = m.space.table(kind);
        auto& jt = tables[std::string(table_name(kind))];
        jt = nlohmann::json::object();
        for (std::size_t r = 1; r < table.size(); ++r) {
            const auto row = table.row(r);
            jt[table.id(r)] = std::vector<double>(row.begin(), row.end());
        }
    }
    return j;
}

inline ModelBundle model_from_json(const nlohmann::json& j) {
    detail::check_format(j, "cafata-model", kModelFormatVersion);
    try {
        ModelBundle m{EmbeddingSpace(j.at("dimension").get<std::size_t>(), j.at("leaky_slope").get<double>(),
                                     j.at("seed").get<std::uint64_t>()),
                      detail::catalog_from_json(j.at("catalog")),
                      j.at("schema").get<FactorSchema>(),
                      j.at("factors").get<std::vector<std::string>>(),
                      {j.at("scale").at("min").get<double>(), j.at("scale").at("max").get<double>()},
                      parse_variant(j.at("variant").get<std::string>())};
        m.scale.validate();
        const auto& tables = j.at("tables");
        for (auto kind : kAllTables) {
            const auto name = std::string(table_name(kind));
            if (!tables.contains(name)) continue;
            for (const auto& [id, values] : tables.at(name).items()) {
                m.space.table(kind).insert(id, values.get<std::vector<double>>());
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

inline void save_model(const std::filesystem::path& path, const ModelBundle& m) {
    detail::write_text(path, to_json(m).dump(1) + "\n");
}

inline ModelBundle load_model(const std::filesystem::path& path) {
    return model_from_json(detail::read_json(path));
}

inline nlohmann::json to_json(const Dataset& ds) {
    nlohmann::json j;
    j["format"] = "cafata-dataset";
    j["version"] = kDatasetFormatVersion;
    j["scale"] = {{"min", ds.scale.min}, {"max", ds.scale.max}};
    j["factors"] = ds.factors;
    j["schema"] = ds.schema;
    j["catalog"] = detail::catalog_to_json(ds.catalog);
    j["train"] = detail::interactions_to_json(ds.train);
    j["val"] = detail::interactions_to_json(ds.val);
    j["test"] = detail::interactions_to_json(ds.test);
    return j;
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
    detail::check_format(j, "cafata-dataset", kDatasetFormatVersion);
    try {
        Dataset ds;
        ds.scale = {j.at("scale").at("min").get<double>(), j.at("scale").at("max").get<double>()};
        ds.factors = j.at("factors").get<std::vector<std::string>>();
        ds.schema = j.at("schema").get<FactorSchema>();
        ds.catalog = detail::catalog_from_json(j.at("catalog"));
        ds.train = detail::interactions_from_json(j.at("train"));
        ds.val = detail::interactions_from_json(j.at("val"));
        ds.test = detail::interactions_from_json(j.at("test"));
        ds.validate();
        return ds;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed dataset document: ") + e.what());
    }
}

inline void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
    detail::write_text(path, to_json(ds).dump(1) + "\n");
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    return dataset_from_json(detail::read_json(path));
}

}  // namespace cafata

#endif  // CAFATA_IO_HPP
