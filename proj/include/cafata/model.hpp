#ifndef CAFATA_MODEL_HPP
#define CAFATA_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cafata/embedding_space.hpp"
#include "cafata/errors.hpp"

namespace cafata {

namespace detail {

template <class T, class A, class B>
T dot(std::span<A> a, std::span<B> b) {
    T acc{};
    for (std::size_t k = 0; k < a.size(); ++k) acc += static_cast<T>(a[k]) * static_cast<T>(b[k]);
    return acc;
}

}  // namespace detail

template <class T>
T leaky_relu(T x, T slope) {
    return x > T(0) ? x : slope * x;
}

/// Derivative used by the backward pass; the kink at 0 takes the negative branch.
template <class T>
T leaky_relu_grad(T x, T slope) {
    return x > T(0) ? T(1) : slope;
}

/// exp(LeakyReLU(s_k)) / sum_j exp(LeakyReLU(s_j)), shifted by the max for stability.
template <class T>
std::vector<T> leaky_softmax(std::span<const T> scores, T slope) {
    using std::exp;
    std::vector<T> out(scores.size());
    if (scores.empty()) return out;
    T hi = leaky_relu(scores[0], slope);
    for (std::size_t k = 0; k < scores.size(); ++k) {
        out[k] = leaky_relu(scores[k], slope);
        hi = std::max(hi, out[k]);
    }
    T total{};
    for (auto& x : out) {
        x = exp(x - hi);
        total += x;
    }
    for (auto& x : out) x /= total;
    return out;
}

/// Normalizes id-tagged scores onto the probability simplex.
inline std::map<std::string, double> normalize_scores(
    std::span<const std::pair<std::string, double>> scores, double leaky_slope = 0.2) {
    if (scores.empty()) throw InvalidArgument("empty normalization domain");
    std::vector<double> raw;
    raw.reserve(scores.size());
    for (const auto& [id, s] : scores) {
        if (!std::isfinite(s)) throw InvalidArgument("non-finite score for '" + id + "'");
        raw.push_back(s);
    }
    const auto weights = leaky_softmax<double>(raw, leaky_slope);
    std::map<std::string, double> out;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (!out.emplace(scores[k].first, weights[k]).second) {
            throw InvalidArgument("duplicate id '" + scores[k].first + "' in normalization domain");
        }
    }
    return out;
}

inline std::map<std::string, double> normalize_scores(
    const std::vector<std::pair<std::string, double>>& scores, double leaky_slope = 0.2) {
    return normalize_scores(std::span<const std::pair<std::string, double>>(scores), leaky_slope);
}

/// Table indices of everything one prediction touches, resolved once.
struct ResolvedQuery {
    struct ContextTerm {
        std::size_t factor;
        std::size_t condition;
    };
    struct TypeGroup {
        std::size_t type;
        std::vector<std::size_t> features;
    };

    std::size_t user = 0;
    std::size_t item = 0;  // MF only
    std::vector<ContextTerm> context;
    std::vector<TypeGroup> types;
};

/// Intermediate values of one forward pass, kept for the backward pass.
template <class T>
struct ForwardTrace {
    std::vector<T> factor_scores;
    std::vector<T> factor_importance;
    std::vector<T> user_in_context;
    std::vector<T> type_scores;
    std::vector<T> type_importance;
    std::vector<T> type_contribution;
    std::vector<std::vector<T>> feature_ratings;
    T rating{};
};

template <class T>
ForwardTrace<T> forward(const EmbeddingSpace& space, const ResolvedQuery& q, ModelVariant variant) {
    const std::size_t d = space.dim();
    const T slope = static_cast<T>(space.leaky_slope());
    ForwardTrace<T> tr;

    const auto u = space.users().row(q.user);
    if (variant == ModelVariant::Mf) {
        tr.rating = detail::dot<T>(u, space.items().row(q.item));
        return tr;
    }

    tr.user_in_context.assign(u.begin(), u.end());
    if (uses_context(variant) && !q.context.empty()) {
        tr.factor_scores.reserve(q.context.size());
        for (const auto& term : q.context) {
            tr.factor_scores.push_back(detail::dot<T>(u, space.factors().row(term.factor)));
        }
        tr.factor_importance = leaky_softmax<T>(tr.factor_scores, slope);
        for (std::size_t k = 0; k < q.context.size(); ++k) {
            const auto cd = space.conditions().row(q.context[k].condition);
            for (std::size_t j = 0; j < d; ++j) {
                tr.user_in_context[j] += tr.factor_importance[k] * static_cast<T>(cd[j]);
            }
        }
    }
    if (q.types.empty()) return tr;

    const std::span<const T> ucs(tr.user_in_context);
    const std::size_t n_types = q.types.size();
    if (uses_type_importance(variant)) {
        tr.type_scores.reserve(n_types);
        for (const auto& g : q.types) {
            tr.type_scores.push_back(detail::dot<T>(ucs, space.types().row(g.type)));
        }
        tr.type_importance = leaky_softmax<T>(tr.type_scores, slope);
    } else {
        tr.type_importance.assign(n_types, T(1) / static_cast<T>(n_types));
    }

    tr.feature_ratings.resize(n_types);
    tr.type_contribution.resize(n_types);
    for (std::size_t j = 0; j < n_types; ++j) {
        const auto& g = q.types[j];
        T sum{};
        for (std::size_t f : g.features) {
            const T p = detail::dot<T>(ucs, space.features().row(f));
            tr.feature_ratings[j].push_back(p);
            sum += p;
        }
        tr.type_contribution[j] = sum / static_cast<T>(g.features.size());
        tr.rating += tr.type_importance[j] * tr.type_contribution[j];
    }
    return tr;
}

/// Full trace of one prediction, keyed by ids.
struct PredictionBreakdown {
    std::string user;
    std::string item;
    ContextualSituation situation;
    ModelVariant variant = ModelVariant::CaFata;
    std::map<std::string, double> factor_importance;  // factor -> pi_u^cf
    std::map<std::string, double> type_importance;    // type -> pi_t
    std::map<std::string, double> feature_rating;     // feature -> P
    std::map<std::string, double> type_contribution;  // type -> contr_t
    std::map<std::string, std::vector<std::string>> features_by_type;
    double rating_hat = 0.0;
    /// Set when the item has no features; rating_hat is then the neutral 0.
    bool no_evidence = false;

    /// Type holding `feature`, or empty string when the feature is foreign.
    std::string type_of(const std::string& feature) const {
        for (const auto& [t, feats] : features_by_type) {
            if (std::find(feats.begin(), feats.end(), feature) != feats.end()) return t;
        }
        return {};
    }
};

/// Resolves ids to table rows. FATA variants skip the situation entirely.
inline ResolvedQuery resolve_query(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                                   const std::string& user, const std::string& item,
                                   const ContextualSituation& situation, ModelVariant variant,
                                   LookupMode mode = LookupMode::Strict) {
    ResolvedQuery q;
    q.user = space.users().index_of(user, mode);
    if (variant == ModelVariant::Mf) {
        q.item = space.items().index_of(item, mode);
        return q;
    }
    if (uses_context(variant)) {
        for (const auto& [factor, condition] : situation.assignments) {
            q.context.push_back({space.factors().index_of(factor, mode),
                                 space.conditions().index_of(condition_key(factor, condition), mode)});
        }
    }
    const auto& types = catalog.types_of(item);
    if (types.empty() && mode == LookupMode::Strict) {
        throw InvalidArgument("featureless item '" + item + "'");
    }
    for (const auto& [type, feats] : types) {
        if (feats.empty()) throw InvalidArgument("featureless item '" + item + "'");
        ResolvedQuery::TypeGroup g;
        g.type = uses_type_importance(variant) ? space.types().index_of(type, mode)
                                               : EmbeddingTable::unknown_index();
        for (const auto& f : feats) g.features.push_back(space.features().index_of(f, mode));
        q.types.push_back(std::move(g));
    }
    return q;
}

struct ContextualUser {
    Vector vector;                                    // u_cs
    std::map<std::string, double> factor_importance;  // empty for the empty situation
};

/// Context-adapted user representation u_cs = u + sum_k pi_k cd_k.
inline ContextualUser contextual_user(const EmbeddingSpace& space, const std::string& user,
                                      const ContextualSituation& situation,
                                      LookupMode mode = LookupMode::Strict) {
    ResolvedQuery q;
    q.user = space.users().index_of(user, mode);
    for (const auto& [factor, condition] : situation.assignments) {
        q.context.push_back({space.factors().index_of(factor, mode),
                             space.conditions().index_of(condition_key(factor, condition), mode)});
    }
    const auto tr = forward<double>(space, q, ModelVariant::CaFata);
    ContextualUser out{tr.user_in_context, {}};
    std::size_t k = 0;
    for (const auto& [factor, _] : situation.assignments) {
        out.factor_importance.emplace(factor, tr.factor_importance[k++]);
    }
    return out;
}

/// Importance of each feature type of `item` for the representation `user_in_context`.
inline std::map<std::string, double> feature_type_importance(
    const EmbeddingSpace& space, std::span<const double> user_in_context, const std::string& item,
    const ItemFeatureMap& catalog, LookupMode mode = LookupMode::Strict) {
    const auto& types = catalog.types_of(item);
    if (types.empty()) throw InvalidArgument("featureless item '" + item + "'");
    std::vector<std::pair<std::string, double>> scores;
    for (const auto& [type, _] : types) {
        scores.emplace_back(type, detail::dot<double>(user_in_context,
                                                      space.types().row(space.types().index_of(type, mode))));
    }
    return normalize_scores(scores, space.leaky_slope());
}

/// Predicted rating of a single feature, <u_cs, at>. Not clamped.
inline double feature_rating(const EmbeddingSpace& space, std::span<const double> user_in_context,
                             const std::string& feature, LookupMode mode = LookupMode::Strict) {
    return detail::dot<double>(user_in_context,
                               space.features().row(space.features().index_of(feature, mode)));
}

inline PredictionBreakdown make_breakdown(const ItemFeatureMap& catalog, const std::string& user,
                                          const std::string& item,
                                          const ContextualSituation& situation,
                                          ModelVariant variant, const ForwardTrace<double>& tr) {
    PredictionBreakdown b;
    b.user = user;
    b.item = item;
    b.situation = situation;
    b.variant = variant;
    b.rating_hat = tr.rating;
    if (variant == ModelVariant::Mf) return b;

    if (uses_context(variant)) {
        std::size_t k = 0;
        for (const auto& [factor, _] : situation.assignments) {
            b.factor_importance.emplace(factor, tr.factor_importance[k++]);
        }
    }
    const auto& types = catalog.types_of(item);
    if (types.empty()) {
        b.no_evidence = true;
        return b;
    }
    std::size_t j = 0;
    for (const auto& [type, feats] : types) {
        b.type_importance.emplace(type, tr.type_importance[j]);
        b.type_contribution.emplace(type, tr.type_contribution[j]);
        auto& listed = b.features_by_type[type];
        std::size_t m = 0;
        for (const auto& f : feats) {
            listed.push_back(f);
            b.feature_rating.emplace(f, tr.feature_ratings[j][m++]);
        }
        ++j;
    }
    return b;
}

/// Runs the forward pass for `variant` and returns the traced breakdown.
/// In lenient mode unseen ids fall back to the zero row, and an item without
/// features yields a no-evidence breakdown with rating 0.
inline PredictionBreakdown predict(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                                   const std::string& user, const std::string& item,
                                   const ContextualSituation& situation, ModelVariant variant,
                                   LookupMode mode = LookupMode::Strict) {
    const auto q = resolve_query(space, catalog, user, item, situation, variant, mode);
    const auto tr = forward<double>(space, q, variant);
    if (!std::isfinite(tr.rating)) {
        throw NumericalError("non-finite prediction for user '" + user + "', item '" + item + "'");
    }
    return make_breakdown(catalog, user, item, situation, variant, tr);
}

/// Re-evaluates the aggregation with some feature ratings replaced, keeping
/// importances and per-type feature counts fixed. Summation order matches the
/// forward pass, so an empty override map reproduces rating_hat bit for bit.
inline double aggregate_with_overrides(const PredictionBreakdown& b,
                                       const std::map<std::string, double>& overrides) {
    double rating = 0.0;
    for (const auto& [type, feats] : b.features_by_type) {
        double sum = 0.0;
        for (const auto& f : feats) {
            auto it = overrides.find(f);
            sum += it != overrides.end() ? it->second : b.feature_rating.at(f);
        }
        rating += b.type_importance.at(type) * (sum / static_cast<double>(feats.size()));
    }
    return rating;
}

/// Per-feature share of the prediction, pi_t / |at^t| * P. Sums to rating_hat.
inline std::map<std::string, double> feature_attributions(const PredictionBreakdown& b) {
    std::map<std::string, double> out;
    for (const auto& [type, feats] : b.features_by_type) {
        const double w = b.type_importance.at(type) / static_cast<double>(feats.size());
        for (const auto& f : feats) out[f] = w * b.feature_rating.at(f);
    }
    return out;
}

}  // namespace cafata

#endif  // CAFATA_MODEL_HPP
