#ifndef CAFATA_SYNTHETIC_HPP
#define CAFATA_SYNTHETIC_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "cafata/data.hpp"
#include "cafata/embedding_space.hpp"
#include "cafata/model.hpp"

namespace cafata {

namespace detail {

inline std::string numbered(const char* prefix, std::size_t k, int width = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, k);
    return buf;
}

}  // namespace detail

/// Hidden CA-FATA model plus interactions sampled from it.
struct PlantedConfig {
    std::size_t users = 200;
    std::size_t items = 100;
    std::size_t factors = 3;
    std::size_t conditions_per_factor = 3;
    std::size_t types = 3;
    std::size_t features_per_type = 10;
    std::size_t max_features_per_item_type = 2;
    std::size_t interactions = 20000;
    std::size_t dim = 8;
    double noise = 0.05;
    double user_stddev = 0.35;
    double factor_stddev = 0.5;
    double condition_stddev = 0.35;
    double type_stddev = 0.6;
    double feature_stddev = 0.35;
    double leaky_slope = 0.2;
    std::uint64_t seed = 1;
};

struct PlantedData {
    EmbeddingSpace truth;
    Dataset dataset;  // scale [-1, 1], split 8:1:1 with the same seed
};

inline PlantedData make_planted_data(const PlantedConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    EmbeddingSpace truth(cfg.dim, cfg.leaky_slope, cfg.seed);
    InteractionTable table;
    ItemFeatureMap catalog;

    for (std::size_t u = 0; u < cfg.users; ++u) {
        truth.add_random(TableKind::User, detail::numbered("u", u), rng, cfg.user_stddev);
    }
    for (std::size_t f = 0; f < cfg.factors; ++f) {
        const auto factor = detail::numbered("f", f, 1);
        table.factors.push_back(factor);
        truth.add_random(TableKind::Factor, factor, rng, cfg.factor_stddev);
        for (std::size_t c = 0; c < cfg.conditions_per_factor; ++c) {
            const auto cond = factor + detail::numbered("c", c, 1);
            table.schema[factor].insert(cond);
            truth.add_random(TableKind::Condition, condition_key(factor, cond), rng, cfg.condition_stddev);
        }
    }
    for (std::size_t t = 0; t < cfg.types; ++t) {
        const auto type = detail::numbered("t", t, 1);
        truth.add_random(TableKind::Type, type, rng, cfg.type_stddev);
        for (std::size_t a = 0; a < cfg.features_per_type; ++a) {
            truth.add_random(TableKind::Feature, type + detail::numbered("_a", a, 2), rng,
                             cfg.feature_stddev);
        }
    }
    std::uniform_int_distribution<std::size_t> n_feat(1, std::max<std::size_t>(1, cfg.max_features_per_item_type));
    std::uniform_int_distribution<std::size_t> pick_feat(0, cfg.features_per_type - 1);
    for (std::size_t i = 0; i < cfg.items; ++i) {
        const auto item = detail::numbered("i", i);
        for (std::size_t t = 0; t < cfg.types; ++t) {
            const auto type = detail::numbered("t", t, 1);
            const auto n = n_feat(rng);
            for (std::size_t k = 0; k < n; ++k) {
                catalog.add(item, type, type + detail::numbered("_a", pick_feat(rng), 2));
            }
        }
    }

    std::uniform_int_distribution<std::size_t> pick_user(0, cfg.users - 1);
    std::uniform_int_distribution<std::size_t> pick_item(0, cfg.items - 1);
    std::uniform_int_distribution<std::size_t> pick_cond(0, cfg.conditions_per_factor - 1);
    std::normal_distribution<double> noise(0.0, cfg.noise);
    for (std::size_t n = 0; n < cfg.interactions; ++n) {
        RawInteraction r;
        r.user = detail::numbered("u", pick_user(rng));
        r.item = detail::numbered("i", pick_item(rng));
        for (const auto& factor : table.factors) {
            r.situation.assign(factor, factor + detail::numbered("c", pick_cond(rng), 1));
        }
        const double clean = predict(truth, catalog, r.user, r.item, r.situation, ModelVariant::CaFata).rating_hat;
        r.rating = std::clamp(clean + noise(rng), -1.0, 1.0);
        table.rows.push_back(std::move(r));
    }

    IngestOptions opts;
    opts.scale = RatingScale{-1.0, 1.0};
    opts.seed = cfg.seed;
    return {std::move(truth), ingest(std::move(table), std::move(catalog), opts)};
}

/// One randomly drawn model with a single user, situation and item, used by
/// the property checkers.
struct RandomInstance {
    EmbeddingSpace space;
    ItemFeatureMap catalog;
    std::string user;
    std::string item;
    ContextualSituation situation;
};

struct RandomInstanceOptions {
    std::size_t dim = 8;
    std::size_t max_factors = 3;   // situation size drawn from [0, max_factors]
    std::size_t max_types = 3;     // drawn from [1, max_types]
    std::size_t max_features = 3;  // per type, drawn from [1, max_features]
    double neutral_probability = 0.2;  // chance a feature embedding is exactly zero
    double stddev = 0.5;
};

template <class Rng>
RandomInstance random_instance(Rng& rng, const RandomInstanceOptions& opt) {
    std::uniform_int_distribution<std::size_t> n_factors(0, opt.max_factors);
    std::uniform_int_distribution<std::size_t> n_types(1, std::max<std::size_t>(1, opt.max_types));
    std::uniform_int_distribution<std::size_t> n_features(1, std::max<std::size_t>(1, opt.max_features));
    std::bernoulli_distribution neutral(opt.neutral_probability);

    RandomInstance inst{EmbeddingSpace(opt.dim), {}, "u", "i", {}};
    inst.space.add_random(TableKind::User, inst.user, rng, opt.stddev);
    const auto factors = n_factors(rng);
    for (std::size_t f = 0; f < factors; ++f) {
        const auto factor = detail::numbered("cf", f, 1);
        const auto cond = detail::numbered("cd", f, 1);
        inst.space.add_random(TableKind::Factor, factor, rng, opt.stddev);
        inst.space.add_random(TableKind::Condition, condition_key(factor, cond), rng, opt.stddev);
        inst.situation.assign(factor, cond);
    }
    const auto types = n_types(rng);
    for (std::size_t t = 0; t < types; ++t) {
        const auto type = detail::numbered("t", t, 1);
        inst.space.add_random(TableKind::Type, type, rng, opt.stddev);
        const auto feats = n_features(rng);
        for (std::size_t a = 0; a < feats; ++a) {
            const auto feature = type + detail::numbered("_at", a, 1);
            if (neutral(rng)) {
                inst.space.features().insert(feature, Vector(opt.dim, 0.0));
            } else {
                inst.space.add_random(TableKind::Feature, feature, rng, opt.stddev);
            }
            inst.catalog.add(inst.item, type, feature);
        }
    }
    return inst;
}

}  // namespace cafata

#endif  // CAFATA_SYNTHETIC_HPP
