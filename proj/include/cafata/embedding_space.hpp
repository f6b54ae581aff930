#ifndef CAFATA_EMBEDDING_SPACE_HPP
#define CAFATA_EMBEDDING_SPACE_HPP

#include <array>
#include <cstdint>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cafata/errors.hpp"

namespace cafata {

using Vector = std::vector<double>;

/// Id of the reserved row present in every table. It holds the zero vector,
/// is never trained, and absorbs ids not seen during training.
inline constexpr std::string_view kUnknownId = "<unk>";

enum class LookupMode {
    Strict,   ///< unknown ids raise UnknownIdError
    Lenient,  ///< unknown ids resolve to the reserved zero row
};

enum class ModelVariant { CaFata, Fata, AvgCaFata, AvgFata, Mf };

inline std::string to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::CaFata: return "ca-fata";
        case ModelVariant::Fata: return "fata";
        case ModelVariant::AvgCaFata: return "avg-ca-fata";
        case ModelVariant::AvgFata: return "avg-fata";
        case ModelVariant::Mf: return "mf";
    }
    return "unknown";
}

inline ModelVariant parse_variant(std::string_view name) {
    for (auto v : {ModelVariant::CaFata, ModelVariant::Fata, ModelVariant::AvgCaFata,
                   ModelVariant::AvgFata, ModelVariant::Mf}) {
        if (to_string(v) == name) return v;
    }
    throw InvalidArgument("unknown model variant '" + std::string(name) +
                          "' (expected ca-fata, fata, avg-ca-fata, avg-fata or mf)");
}

inline constexpr bool uses_context(ModelVariant v) {
    return v == ModelVariant::CaFata || v == ModelVariant::AvgCaFata;
}
inline constexpr bool uses_type_importance(ModelVariant v) {
    return v == ModelVariant::CaFata || v == ModelVariant::Fata;
}
inline constexpr bool uses_features(ModelVariant v) { return v != ModelVariant::Mf; }

/// Contiguous id -> vector table. Row 0 is always the reserved unknown row.
class EmbeddingTable {
public:
    EmbeddingTable(std::string name, std::size_t dim) : name_(std::move(name)), dim_(dim) {
        if (dim_ == 0) throw InvalidArgument("embedding dimension must be positive");
        insert(std::string(kUnknownId), Vector(dim_, 0.0));
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    static constexpr std::size_t unknown_index() noexcept { return 0; }

    bool contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

    std::optional<std::size_t> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(std::string_view id, LookupMode mode = LookupMode::Strict) const {
        if (auto idx = find(id)) return *idx;
        if (mode == LookupMode::Lenient) return unknown_index();
        throw UnknownIdError(name_, std::string(id));
    }

    std::size_t insert(const std::string& id, std::span<const double> values) {
        if (values.size() != dim_) {
            throw InvalidArgument("vector for '" + id + "' in table '" + name_ + "' has length " +
                                  std::to_string(values.size()) + ", expected " +
                                  std::to_string(dim_));
        }
        if (index_.count(id)) {
            throw InvalidArgument("duplicate id '" + id + "' in table '" + name_ + "'");
        }
        for (double x : values) {
            if (!std::isfinite(x)) {
                throw InvalidArgument("non-finite value for '" + id + "' in table '" + name_ + "'");
            }
        }
        const std::size_t idx = ids_.size();
        ids_.push_back(id);
        index_.emplace(id, idx);
        data_.insert(data_.end(), values.begin(), values.end());
        return idx;
    }

    std::size_t insert(const std::string& id, std::initializer_list<double> values) {
        return insert(id, std::span<const double>(values.begin(), values.size()));
    }

    std::span<double> row(std::size_t idx) { return {data_.data() + idx * dim_, dim_}; }
    std::span<const double> row(std::size_t idx) const { return {data_.data() + idx * dim_, dim_}; }
    std::span<const double> row(std::string_view id) const { return row(index_of(id)); }

    const std::string& id(std::size_t idx) const { return ids_.at(idx); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

    /// Raw storage; rows are laid out back to back.
    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

private:
    std::string name_;
    std::size_t dim_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    Vector data_;
};

enum class TableKind : std::size_t { User, Factor, Condition, Type, Feature, Item };
inline constexpr std::size_t kTableCount = 6;
inline constexpr std::array<TableKind, kTableCount> kAllTables = {
    TableKind::User, TableKind::Factor, TableKind::Condition,
    TableKind::Type, TableKind::Feature, TableKind::Item};

inline constexpr std::string_view table_name(TableKind kind) {
    constexpr std::array<std::string_view, kTableCount> names = {
        "users", "factors", "conditions", "types", "features", "items"};
    return names[static_cast<std::size_t>(kind)];
}

/// Conditions are stored under "factor=condition" so that equal condition
/// names under different factors get distinct embeddings.
inline std::string condition_key(std::string_view factor, std::string_view condition) {
    std::string key;
    key.reserve(factor.size() + condition.size() + 1);
    key.append(factor).append("=").append(condition);
    return key;
}

/// All learnable vectors of the model, sharing one dimension.
class EmbeddingSpace {
public:
    EmbeddingSpace(std::size_t dim, double leaky_slope = 0.2, std::uint64_t seed = 0)
        : dim_(dim), leaky_slope_(leaky_slope), seed_(seed),
          tables_{EmbeddingTable(std::string(table_name(TableKind::User)), dim),
                  EmbeddingTable(std::string(table_name(TableKind::Factor)), dim),
                  EmbeddingTable(std::string(table_name(TableKind::Condition)), dim),
                  EmbeddingTable(std::string(table_name(TableKind::Type)), dim),
                  EmbeddingTable(std::string(table_name(TableKind::Feature)), dim),
                  EmbeddingTable(std::string(table_name(TableKind::Item)), dim)} {
        if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
            throw InvalidArgument("leaky_slope must lie in (0, 1)");
        }
    }

    std::size_t dim() const noexcept { return dim_; }
    double leaky_slope() const noexcept { return leaky_slope_; }
    std::uint64_t seed() const noexcept { return seed_; }

    EmbeddingTable& table(TableKind kind) { return tables_[static_cast<std::size_t>(kind)]; }
    const EmbeddingTable& table(TableKind kind) const {
        return tables_[static_cast<std::size_t>(kind)];
    }

    EmbeddingTable& users() { return table(TableKind::User); }
    EmbeddingTable& factors() { return table(TableKind::Factor); }
    EmbeddingTable& conditions() { return table(TableKind::Condition); }
    EmbeddingTable& types() { return table(TableKind::Type); }
    EmbeddingTable& features() { return table(TableKind::Feature); }
    EmbeddingTable& items() { return table(TableKind::Item); }
    const EmbeddingTable& users() const { return table(TableKind::User); }
    const EmbeddingTable& factors() const { return table(TableKind::Factor); }
    const EmbeddingTable& conditions() const { return table(TableKind::Condition); }
    const EmbeddingTable& types() const { return table(TableKind::Type); }
    const EmbeddingTable& features() const { return table(TableKind::Feature); }
    const EmbeddingTable& items() const { return table(TableKind::Item); }

    void add_condition(std::string_view factor, std::string_view condition,
                       std::span<const double> values) {
        conditions().insert(condition_key(factor, condition), values);
    }

    /// Inserts `id` with i.i.d. N(0, stddev^2) entries drawn from `rng`.
    template <class Rng>
    std::size_t add_random(TableKind kind, const std::string& id, Rng& rng, double stddev = 0.1) {
        std::normal_distribution<double> normal(0.0, stddev);
        Vector v(dim_);
        for (auto& x : v) x = normal(rng);
        return table(kind).insert(id, v);
    }

    friend bool operator==(const EmbeddingSpace&, const EmbeddingSpace&) = default;

private:
    std::size_t dim_;
    double leaky_slope_;
    std::uint64_t seed_;
    std::array<EmbeddingTable, kTableCount> tables_;
};

/// Assignment of at most one contextual condition per contextual factor.
struct ContextualSituation {
    std::map<std::string, std::string> assignments;  // factor -> condition

    bool empty() const noexcept { return assignments.empty(); }
    std::size_t size() const noexcept { return assignments.size(); }

    void assign(const std::string& factor, const std::string& condition) {
        if (!assignments.emplace(factor, condition).second) {
            throw InvalidArgument("factor '" + factor + "' assigned twice in one situation");
        }
    }

    friend bool operator==(const ContextualSituation&, const ContextualSituation&) = default;
};

/// factor -> declared set of conditions.
using FactorSchema = std::map<std::string, std::set<std::string>>;

/// item -> (feature type -> non-empty set of features).
class ItemFeatureMap {
public:
    using TypeMap = std::map<std::string, std::set<std::string>>;

    /// Adding an existing triple is a no-op. A feature may sit under only
    /// one type of a given item.
    void add(const std::string& item, const std::string& type, const std::string& feature) {
        auto& types = items_[item];
        for (const auto& [t, feats] : types) {
            if (t != type && feats.count(feature)) {
                throw InvalidArgument("feature '" + feature + "' of item '" + item +
                                      "' listed under both '" + t + "' and '" + type + "'");
            }
        }
        types[type].insert(feature);
    }

    bool contains(std::string_view item) const { return items_.count(std::string(item)) > 0; }

    /// Empty map when the item is absent.
    const TypeMap& types_of(std::string_view item) const {
        static const TypeMap empty;
        auto it = items_.find(std::string(item));
        return it == items_.end() ? empty : it->second;
    }

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const std::map<std::string, TypeMap>& items() const noexcept { return items_; }

    std::set<std::string> all_types() const {
        std::set<std::string> out;
        for (const auto& [item, types] : items_)
            for (const auto& [t, _] : types) out.insert(t);
        return out;
    }

    std::set<std::string> all_features() const {
        std::set<std::string> out;
        for (const auto& [item, types] : items_)
            for (const auto& [_, feats] : types) out.insert(feats.begin(), feats.end());
        return out;
    }

    friend bool operator==(const ItemFeatureMap&, const ItemFeatureMap&) = default;

private:
    std::map<std::string, TypeMap> items_;
};

}  // namespace cafata

#endif  // CAFATA_EMBEDDING_SPACE_HPP
