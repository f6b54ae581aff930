#ifndef CAFATA_DATA_HPP
#define CAFATA_DATA_HPP

#include <algorithm>
#include <cstdint>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/tokenizer.hpp>

#include "cafata/embedding_space.hpp"
#include "cafata/errors.hpp"

namespace cafata {

/// One logged interaction on the original rating scale.
struct RawInteraction {
    std::string user;
    std::string item;
    double rating = 0.0;
    ContextualSituation situation;

    friend bool operator==(const RawInteraction&, const RawInteraction&) = default;
};

/// Parsed interactions file. `factors` keeps the column order of the header.
struct InteractionTable {
    std::vector<std::string> factors;
    FactorSchema schema;
    std::vector<RawInteraction> rows;
};

/// Condition assigned to an empty context cell.
inline std::string unknown_condition(std::string_view factor) {
    return "unknown:" + std::string(factor);
}

namespace detail {

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

/// Comma-separated fields; double quotes group fields containing commas.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    using Separator = boost::escaped_list_separator<char>;
    boost::tokenizer<Separator> tok(line, Separator('\0', ',', '"'));
    std::vector<std::string> out;
    for (const auto& field : tok) out.push_back(trim(field));
    return out;
}

/// Reads non-blank lines, stripping a trailing CR. Returns false at EOF.
inline bool next_record(std::istream& in, std::string& line, std::size_t& row) {
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) return true;
    }
    return false;
}

inline std::size_t require_column(const std::vector<std::string>& header, std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing mandatory column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

inline std::optional<double> parse_real(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace detail

/// Columns user_id, item_id and rating are mandatory; every other column is
/// a contextual factor and the schema is inferred from observed values.
inline InteractionTable parse_interactions(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    if (!detail::next_record(in, line, row)) throw DataError("missing header row");
    const auto header = detail::split_csv_line(line);
    const std::size_t user_col = detail::require_column(header, "user_id");
    const std::size_t item_col = detail::require_column(header, "item_id");
    const std::size_t rating_col = detail::require_column(header, "rating");

    InteractionTable table;
    std::vector<std::size_t> factor_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == user_col || c == item_col || c == rating_col) continue;
        if (header[c].empty()) throw DataError("empty column name in header", row);
        factor_cols.push_back(c);
        table.factors.push_back(header[c]);
        table.schema[header[c]];
    }

    while (detail::next_record(in, line, row)) {
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            row);
        }
        RawInteraction r;
        r.user = fields[user_col];
        r.item = fields[item_col];
        if (r.user.empty() || r.item.empty()) throw DataError("empty user_id or item_id", row);
        const auto rating = detail::parse_real(fields[rating_col]);
        if (!rating) throw DataError("non-numeric rating '" + fields[rating_col] + "'", row);
        r.rating = *rating;
        for (std::size_t k = 0; k < factor_cols.size(); ++k) {
            const auto& factor = table.factors[k];
            std::string condition = fields[factor_cols[k]];
            if (condition.empty()) condition = unknown_condition(factor);
            table.schema[factor].insert(condition);
            r.situation.assignments.emplace(factor, std::move(condition));
        }
        table.rows.push_back(std::move(r));
    }
    return table;
}

inline InteractionTable load_interactions(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_interactions(in);
}

/// Long format: item_id,feature_type,feature_value. Duplicate rows collapse.
inline ItemFeatureMap parse_item_features(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    if (!detail::next_record(in, line, row)) throw DataError("missing header row");
    const auto header = detail::split_csv_line(line);
    const std::size_t item_col = detail::require_column(header, "item_id");
    const std::size_t type_col = detail::require_column(header, "feature_type");
    const std::size_t value_col = detail::require_column(header, "feature_value");

    ItemFeatureMap catalog;
    while (detail::next_record(in, line, row)) {
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            row);
        }
        if (fields[item_col].empty() || fields[type_col].empty() || fields[value_col].empty()) {
            throw DataError("empty item_id, feature_type or feature_value", row);
        }
        try {
            catalog.add(fields[item_col], fields[type_col], fields[value_col]);
        } catch (const InvalidArgument& e) {
            throw DataError(e.what(), row);
        }
    }
    return catalog;
}

inline ItemFeatureMap load_item_features(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_item_features(in);
}

enum class KCoreMode {
    Symmetric,  ///< users and items both need >= k interactions
    UsersOnly,
};

/// Iteratively drops users (and items, in symmetric mode) with fewer than k
/// interactions until nothing changes. Surviving rows keep their order.
inline std::vector<RawInteraction> k_core_filter(std::vector<RawInteraction> rows, std::size_t k,
                                                 KCoreMode mode = KCoreMode::Symmetric) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    while (true) {
        std::unordered_map<std::string, std::size_t> user_deg, item_deg;
        for (const auto& r : rows) {
            ++user_deg[r.user];
            ++item_deg[r.item];
        }
        const auto keep = [&](const RawInteraction& r) {
            if (user_deg[r.user] < k) return false;
            return mode == KCoreMode::UsersOnly || item_deg[r.item] >= k;
        };
        const auto before = rows.size();
        std::erase_if(rows, [&](const RawInteraction& r) { return !keep(r); });
        if (rows.size() == before) return rows;
    }
}

struct RatingScale {
    double min = 0.0;
    double max = 1.0;

    void validate() const {
        if (!(std::isfinite(min) && std::isfinite(max) && min < max)) {
            throw InvalidArgument("rating scale requires finite min < max");
        }
    }

    double half_range() const { return (max - min) / 2.0; }

    /// Linear map of [min, max] onto [-1, 1].
    double to_normalized(double r) const {
        if (!(r >= min && r <= max)) {
            throw InvalidArgument("rating " + std::to_string(r) + " outside scale [" +
                                  std::to_string(min) + ", " + std::to_string(max) + "]");
        }
        return 2.0 * (r - min) / (max - min) - 1.0;
    }

    double to_original(double r) const { return (r + 1.0) * (max - min) / 2.0 + min; }

    friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

enum class ScaleDirection { ToNormalized, ToOriginal };

inline std::vector<double> scale_ratings(std::span<const double> values, const RatingScale& scale,
                                         ScaleDirection direction) {
    scale.validate();
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        out.push_back(direction == ScaleDirection::ToNormalized ? scale.to_normalized(v)
                                                                : scale.to_original(v));
    }
    return out;
}

/// ln(1 + count), used to compress interaction counts into a rating.
inline double log_transform(double count) {
    if (!(count >= 0.0)) throw InvalidArgument("log transform expects a non-negative count");
    return std::log1p(count);
}

struct Partitions {
    std::vector<RawInteraction> train;
    std::vector<RawInteraction> val;
    std::vector<RawInteraction> test;
};

/// Seeded shuffle, then contiguous 8:1:1 cuts at floor(0.8n) and floor(0.9n).
inline Partitions split(std::vector<RawInteraction> rows, std::uint64_t seed) {
    const std::size_t n = rows.size();
    if (n < 10) throw InvalidArgument("split needs at least 10 interactions, got " + std::to_string(n));
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    const std::size_t cut_train = n * 8 / 10;
    const std::size_t cut_val = n * 9 / 10;
    Partitions p;
    p.train.assign(std::make_move_iterator(rows.begin()),
                   std::make_move_iterator(rows.begin() + static_cast<std::ptrdiff_t>(cut_train)));
    p.val.assign(std::make_move_iterator(rows.begin() + static_cast<std::ptrdiff_t>(cut_train)),
                 std::make_move_iterator(rows.begin() + static_cast<std::ptrdiff_t>(cut_val)));
    p.test.assign(std::make_move_iterator(rows.begin() + static_cast<std::ptrdiff_t>(cut_val)),
                  std::make_move_iterator(rows.end()));
    return p;
}

/// Preprocessed, split interactions plus everything needed to build a model.
struct Dataset {
    std::vector<RawInteraction> train;
    std::vector<RawInteraction> val;
    std::vector<RawInteraction> test;
    ItemFeatureMap catalog;
    RatingScale scale;
    std::vector<std::string> factors;  // column order
    FactorSchema schema;

    void validate() const {
        scale.validate();
        for (const auto* part : {&train, &val, &test}) {
            for (const auto& r : *part) {
                if (!catalog.empty() && !catalog.contains(r.item)) {
                    throw InvalidArgument("interaction references uncatalogued item '" + r.item + "'");
                }
                for (const auto& [f, c] : r.situation.assignments) {
                    auto it = schema.find(f);
                    if (it == schema.end() || !it->second.count(c)) {
                        throw InvalidArgument("condition '" + c + "' not declared for factor '" + f + "'");
                    }
                }
            }
        }
    }
};

struct IngestOptions {
    bool log_transform = false;
    std::size_t k_core = 1;
    KCoreMode k_core_mode = KCoreMode::Symmetric;
    std::optional<RatingScale> scale;  // inferred from the data when absent
    std::uint64_t seed = 0;
};

struct IngestReport {
    std::size_t loaded = 0;
    std::size_t dropped_uncatalogued = 0;
    std::size_t dropped_k_core = 0;
};

/// Log transform (optional), catalogue filter, k-core, scale, split.
/// An empty catalogue keeps every interaction (MF-only datasets).
inline Dataset ingest(InteractionTable table, ItemFeatureMap catalog, const IngestOptions& options,
                      IngestReport* report = nullptr) {
    IngestReport rep;
    rep.loaded = table.rows.size();
    auto rows = std::move(table.rows);
    if (options.log_transform) {
        for (auto& r : rows) r.rating = log_transform(r.rating);
    }
    if (!catalog.empty()) {
        const auto before = rows.size();
        std::erase_if(rows, [&](const RawInteraction& r) { return !catalog.contains(r.item); });
        rep.dropped_uncatalogued = before - rows.size();
    }
    {
        const auto before = rows.size();
        rows = k_core_filter(std::move(rows), options.k_core, options.k_core_mode);
        rep.dropped_k_core = before - rows.size();
    }

    Dataset ds;
    if (options.scale) {
        ds.scale = *options.scale;
    } else {
        if (rows.empty()) throw InvalidArgument("no interactions left to infer a rating scale");
        const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
            [](const RawInteraction& a, const RawInteraction& b) { return a.rating < b.rating; });
        ds.scale = {lo->rating, hi->rating};
    }
    ds.scale.validate();
    for (const auto& r : rows) (void)ds.scale.to_normalized(r.rating);

    auto parts = split(std::move(rows), options.seed);
    ds.train = std::move(parts.train);
    ds.val = std::move(parts.val);
    ds.test = std::move(parts.test);
    ds.catalog = std::move(catalog);
    ds.factors = std::move(table.factors);
    ds.schema = std::move(table.schema);
    if (report) *report = rep;
    return ds;
}

}  // namespace cafata

#endif  // CAFATA_DATA_HPP
