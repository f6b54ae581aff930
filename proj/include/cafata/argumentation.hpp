#ifndef CAFATA_ARGUMENTATION_HPP
#define CAFATA_ARGUMENTATION_HPP

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cafata/embedding_space.hpp"
#include "cafata/errors.hpp"
#include "cafata/model.hpp"
#include "cafata/synthetic.hpp"

namespace cafata {

enum class Polarity { Support, Attack, Neutral };

inline std::string to_string(Polarity p) {
    switch (p) {
        case Polarity::Support: return "support";
        case Polarity::Attack: return "attack";
        case Polarity::Neutral: return "neutral";
    }
    return "neutral";
}

inline Polarity classify_polarity(double strength, double eps_neutral = 0.0) {
    if (strength > eps_neutral) return Polarity::Support;
    if (strength < -eps_neutral) return Polarity::Attack;
    return Polarity::Neutral;
}

struct FeatureArgument {
    std::string feature;
    double strength = 0.0;  // sigma(at) = P
    Polarity polarity = Polarity::Neutral;
};

/// Star-shaped tripolar framework: every feature argument points at rec^i.
struct TripolarFramework {
    std::string item;
    std::string rec_argument;
    std::vector<FeatureArgument> feature_arguments;  // sorted by feature id
    std::set<std::string> attackers;     // R-
    std::set<std::string> supporters;    // R+
    std::set<std::string> neutralizers;  // R0
    double sigma_rec = 0.0;              // r_hat
    double eps_neutral = 0.0;
};

inline std::string rec_argument_id(const std::string& item) { return "rec^" + item; }

/// Partitions the item's features into R-, R+ and R0 by the sign of their
/// predicted rating. A no-evidence breakdown gives a lone rec node.
inline TripolarFramework build_taf(const PredictionBreakdown& b, double eps_neutral = 0.0) {
    if (b.variant == ModelVariant::Mf) throw InvalidArgument("no argumentative structure");
    if (!(eps_neutral >= 0.0)) throw InvalidArgument("eps_neutral must be >= 0");
    TripolarFramework taf;
    taf.item = b.item;
    taf.rec_argument = rec_argument_id(b.item);
    taf.sigma_rec = b.rating_hat;
    taf.eps_neutral = eps_neutral;
    for (const auto& [feature, p] : b.feature_rating) {
        const auto polarity = classify_polarity(p, eps_neutral);
        taf.feature_arguments.push_back({feature, p, polarity});
        switch (polarity) {
            case Polarity::Support: taf.supporters.insert(feature); break;
            case Polarity::Attack: taf.attackers.insert(feature); break;
            case Polarity::Neutral: taf.neutralizers.insert(feature); break;
        }
    }
    return taf;
}

/// r_hat with sigma(feature) forced to 0. The feature keeps its place in
/// |at_i^t| and all importances stay as they were.
inline double mute_and_predict(const PredictionBreakdown& b, const std::string& feature) {
    if (!b.feature_rating.count(feature)) {
        throw InvalidArgument("feature '" + feature + "' does not belong to item '" + b.item + "'");
    }
    return aggregate_with_overrides(b, {{feature, 0.0}});
}

struct PropertyReport {
    std::size_t trials = 0;
    std::size_t passes = 0;
    std::vector<std::string> counterexamples;

    bool ok() const noexcept { return passes == trials && counterexamples.empty(); }
};

namespace detail {

inline std::string describe(const PredictionBreakdown& b) {
    std::ostringstream os;
    os.precision(17);
    os << "user=" << b.user << " item=" << b.item << " r_hat=" << b.rating_hat << " P={";
    bool first = true;
    for (const auto& [f, p] : b.feature_rating) {
        os << (first ? "" : ", ") << f << ':' << p;
        first = false;
    }
    os << '}';
    return os.str();
}

inline int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace detail

/// Weak balance on one breakdown: with a single feature argument, sigma(rec)
/// has the sign of that argument. Empty string when it holds.
inline std::string weak_balance_violation(const PredictionBreakdown& b) {
    if (b.feature_rating.size() != 1) return {};
    const double p = b.feature_rating.begin()->second;
    if (detail::sign(b.rating_hat) == detail::sign(p)) return {};
    return "weak balance: " + to_string(classify_polarity(p)) + " sole argument but " +
           detail::describe(b);
}

/// Weak monotonicity on one breakdown for every feature, plus the linear
/// response of r_hat to raising a single P by `delta`.
inline std::string weak_monotonicity_violation(const PredictionBreakdown& b, double delta,
                                               double linear_tolerance = 1e-12) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& [feature, p] : b.feature_rating) {
        const double muted = mute_and_predict(b, feature);
        const auto polarity = classify_polarity(p);
        const bool ok = (polarity == Polarity::Attack && muted > b.rating_hat) ||
                        (polarity == Polarity::Support && muted < b.rating_hat) ||
                        (polarity == Polarity::Neutral && muted == b.rating_hat);
        if (!ok) {
            os << "weak monotonicity: muting " << to_string(polarity) << ' ' << feature
               << " gives " << muted << "; " << detail::describe(b);
            return os.str();
        }
        const auto type = b.type_of(feature);
        const double expected = b.type_importance.at(type) * delta /
                                static_cast<double>(b.features_by_type.at(type).size());
        const double raised = aggregate_with_overrides(b, {{feature, p + delta}});
        if (!(std::abs((raised - b.rating_hat) - expected) <= linear_tolerance)) {
            os << "linear response: raising " << feature << " by " << delta << " moved r_hat by "
               << (raised - b.rating_hat) << ", expected " << expected << "; " << detail::describe(b);
            return os.str();
        }
    }
    return {};
}

/// Weak balance over `trials` random single-feature instances with d drawn
/// from {1, 8}. Roughly a third of the instances carry a neutral feature.
inline PropertyReport check_weak_balance(std::size_t trials, std::uint64_t seed,
                                         ModelVariant variant = ModelVariant::CaFata) {
    if (trials == 0) throw InvalidArgument("trials must be at least 1");
    std::mt19937_64 rng(seed);
    PropertyReport report{trials, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        RandomInstanceOptions opt;
        opt.dim = (t % 2 == 0) ? 1 : 8;
        opt.max_types = 1;
        opt.max_features = 1;
        opt.neutral_probability = 1.0 / 3.0;
        const auto inst = random_instance(rng, opt);
        const auto b = predict(inst.space, inst.catalog, inst.user, inst.item, inst.situation, variant);
        const auto violation = weak_balance_violation(b);
        if (violation.empty()) {
            ++report.passes;
        } else {
            report.counterexamples.push_back("trial " + std::to_string(t) + ": " + violation);
        }
    }
    return report;
}

/// Weak balance for the given model over random users, situations and
/// single-feature items drawn from it.
inline PropertyReport check_weak_balance(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                                         std::size_t trials, std::uint64_t seed,
                                         ModelVariant variant = ModelVariant::CaFata);

/// Weak monotonicity and the linear response over random multi-feature instances.
inline PropertyReport check_weak_monotonicity(std::size_t trials, std::uint64_t seed,
                                              ModelVariant variant = ModelVariant::CaFata) {
    if (trials == 0) throw InvalidArgument("trials must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> delta(1e-3, 1.0);
    PropertyReport report{trials, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        RandomInstanceOptions opt;
        opt.dim = std::size_t{1} << (t % 4);  // 1, 2, 4, 8
        opt.max_types = 4;
        opt.max_features = 4;
        const auto inst = random_instance(rng, opt);
        const auto b = predict(inst.space, inst.catalog, inst.user, inst.item, inst.situation, variant);
        const auto violation = weak_monotonicity_violation(b, delta(rng));
        if (violation.empty()) {
            ++report.passes;
        } else {
            report.counterexamples.push_back("trial " + std::to_string(t) + ": " + violation);
        }
    }
    return report;
}

namespace detail {

struct ModelSampler {
    std::vector<std::string> users;
    std::vector<std::pair<std::string, std::string>> conditions;  // (factor, condition)
    std::vector<std::string> factors;

    explicit ModelSampler(const EmbeddingSpace& space) {
        for (const auto& id : space.users().ids())
            if (id != kUnknownId) users.push_back(id);
        for (const auto& key : space.conditions().ids()) {
            const auto eq = key.find('=');
            if (key == kUnknownId || eq == std::string::npos) continue;
            conditions.emplace_back(key.substr(0, eq), key.substr(eq + 1));
        }
        if (users.empty()) throw InvalidArgument("model has no users");
    }

    template <class Rng>
    std::pair<std::string, ContextualSituation> draw(Rng& rng) const {
        std::uniform_int_distribution<std::size_t> pick_user(0, users.size() - 1);
        ContextualSituation cs;
        std::bernoulli_distribution coin(0.5);
        for (const auto& [f, c] : conditions) {
            if (!cs.assignments.count(f) && coin(rng)) cs.assign(f, c);
        }
        return {users[pick_user(rng)], cs};
    }
};

}  // namespace detail

inline PropertyReport check_weak_balance(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                                         std::size_t trials, std::uint64_t seed,
                                         ModelVariant variant) {
    if (trials == 0) throw InvalidArgument("trials must be at least 1");
    std::vector<std::string> single;
    for (const auto& [item, types] : catalog.items()) {
        std::size_t n = 0;
        for (const auto& [_, feats] : types) n += feats.size();
        if (n == 1) single.push_back(item);
    }
    if (single.empty()) throw InvalidArgument("catalog has no single-feature item");
    const detail::ModelSampler sampler(space);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, single.size() - 1);
    PropertyReport report{trials, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        const auto [user, cs] = sampler.draw(rng);
        const auto b = predict(space, catalog, user, single[pick(rng)], cs, variant, LookupMode::Lenient);
        const auto violation = weak_balance_violation(b);
        if (violation.empty()) {
            ++report.passes;
        } else {
            report.counterexamples.push_back("trial " + std::to_string(t) + ": " + violation);
        }
    }
    return report;
}

/// Weak monotonicity for the given model over random users, situations and items.
inline PropertyReport check_weak_monotonicity(const EmbeddingSpace& space,
                                              const ItemFeatureMap& catalog, std::size_t trials,
                                              std::uint64_t seed,
                                              ModelVariant variant = ModelVariant::CaFata) {
    if (trials == 0) throw InvalidArgument("trials must be at least 1");
    if (catalog.empty()) throw InvalidArgument("empty catalog");
    std::vector<std::string> items;
    for (const auto& [item, _] : catalog.items()) items.push_back(item);
    const detail::ModelSampler sampler(space);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
    std::uniform_real_distribution<double> delta(1e-3, 1.0);
    PropertyReport report{trials, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        const auto [user, cs] = sampler.draw(rng);
        const auto b = predict(space, catalog, user, items[pick(rng)], cs, variant, LookupMode::Lenient);
        const auto violation = weak_monotonicity_violation(b, delta(rng));
        if (violation.empty()) {
            ++report.passes;
        } else {
            report.counterexamples.push_back("trial " + std::to_string(t) + ": " + violation);
        }
    }
    return report;
}

/// Signed strength with at most six decimals: "+0.52", "-0.11", "0".
inline std::string format_strength(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.6f", x);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "+0" || s == "-0") return "0";
    return s;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

inline std::string dot_quote(const std::string& s) { return "\"" + dot_escape(s) + "\""; }

inline const char* polarity_color(Polarity p) {
    switch (p) {
        case Polarity::Support: return "green";
        case Polarity::Attack: return "red";
        case Polarity::Neutral: return "black";
    }
    return "black";
}

}  // namespace detail

/// Graphviz rendering: green supports, red attacks, black neutral edges,
/// each labelled with the signed strength of its feature.
inline std::string export_dot(const TripolarFramework& taf) {
    std::ostringstream os;
    os << "digraph taf {\n";
    os << "  rankdir=BT;\n";
    os << "  " << detail::dot_quote(taf.rec_argument)
       << " [shape=box, style=filled, fillcolor=lightgray, label="
       << "\"" << detail::dot_escape(taf.rec_argument) << "\\n" << format_strength(taf.sigma_rec) << "\"];\n";
    for (const auto& a : taf.feature_arguments) {
        const char* color = detail::polarity_color(a.polarity);
        os << "  " << detail::dot_quote(a.feature) << " [shape=ellipse, fontcolor=" << color << "];\n";
    }
    for (const auto& a : taf.feature_arguments) {
        const char* color = detail::polarity_color(a.polarity);
        os << "  " << detail::dot_quote(a.feature) << " -> " << detail::dot_quote(taf.rec_argument)
           << " [label=" << detail::dot_quote(format_strength(a.strength)) << ", color=" << color
           << ", fontcolor=" << color << "];\n";
    }
    os << "}\n";
    return os.str();
}

inline constexpr int kTafSchemaVersion = 1;

/// {"schema": "cafata.taf", "version": 1, "item", "rec": {id, strength},
///  "arguments": [{id, strength, polarity}], "relations": {attack, support,
///  neutral: [[feature, rec], ...]}, "eps_neutral"}
inline nlohmann::json to_json(const TripolarFramework& taf) {
    nlohmann::json j;
    j["schema"] = "cafata.taf";
    j["version"] = kTafSchemaVersion;
    j["item"] = taf.item;
    j["rec"] = {{"id", taf.rec_argument}, {"strength", taf.sigma_rec}};
    j["arguments"] = nlohmann::json::array();
    for (const auto& a : taf.feature_arguments) {
        j["arguments"].push_back({{"id", a.feature}, {"strength", a.strength}, {"polarity", to_string(a.polarity)}});
    }
    const auto edges = [&](const std::set<std::string>& s) {
        auto arr = nlohmann::json::array();
        for (const auto& f : s) arr.push_back({f, taf.rec_argument});
        return arr;
    };
    j["relations"] = {{"attack", edges(taf.attackers)},
                      {"support", edges(taf.supporters)},
                      {"neutral", edges(taf.neutralizers)}};
    j["eps_neutral"] = taf.eps_neutral;
    return j;
}

}  // namespace cafata

#endif  // CAFATA_ARGUMENTATION_HPP
