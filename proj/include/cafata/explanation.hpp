#ifndef CAFATA_EXPLANATION_HPP
#define CAFATA_EXPLANATION_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cafata/errors.hpp"
#include "cafata/model.hpp"

namespace cafata {

enum class Scenario {
    StrongRecommendation,  // SR
    WeakRecommendation,    // WR
    NotRecommended,        // NR
};

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::StrongRecommendation: return "SR";
        case Scenario::WeakRecommendation: return "WR";
        case Scenario::NotRecommended: return "NR";
    }
    return "WR";
}

/// id -> human-readable name; ids without an entry render as themselves.
using DisplayNames = std::map<std::string, std::string>;

struct Explanation {
    Scenario scenario = Scenario::WeakRecommendation;
    std::string at1;
    std::optional<std::string> at2;  // absent for single-feature items
    std::optional<std::string> cd;   // absent without context
    std::string rendered;
};

namespace detail {

/// Features ordered by P descending (ties: smaller id first).
inline std::vector<std::pair<std::string, double>> by_rating_desc(const PredictionBreakdown& b) {
    std::vector<std::pair<std::string, double>> v(b.feature_rating.begin(), b.feature_rating.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    return v;
}

/// Features ordered by P ascending (ties: smaller id first).
inline std::vector<std::pair<std::string, double>> by_rating_asc(const PredictionBreakdown& b) {
    std::vector<std::pair<std::string, double>> v(b.feature_rating.begin(), b.feature_rating.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
    return v;
}

inline const std::string& display(const DisplayNames& names, const std::string& id) {
    auto it = names.find(id);
    return it == names.end() ? id : it->second;
}

}  // namespace detail

/// NR below tau_neg; SR at or above tau_pos when the two strongest features
/// are both positive; WR otherwise.
inline Scenario classify_scenario(const PredictionBreakdown& b, double tau_pos = 0.2,
                                  double tau_neg = 0.0) {
    if (!(tau_neg <= 0.0 && 0.0 <= tau_pos)) throw InvalidArgument("thresholds need tau_neg <= 0 <= tau_pos");
    if (b.rating_hat < tau_neg) return Scenario::NotRecommended;
    if (b.rating_hat >= tau_pos && !b.feature_rating.empty()) {
        const auto ranked = detail::by_rating_desc(b);
        const std::size_t top = std::min<std::size_t>(2, ranked.size());
        const bool all_positive = std::all_of(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top),
                                              [](const auto& f) { return f.second > 0.0; });
        if (all_positive) return Scenario::StrongRecommendation;
    }
    return Scenario::WeakRecommendation;
}

/// Condition of the most important factor in the situation (ties: smaller factor id).
inline std::optional<std::string> most_influential_condition(const PredictionBreakdown& b) {
    std::optional<std::string> best_factor;
    double best = 0.0;
    for (const auto& [factor, pi] : b.factor_importance) {
        if (!best_factor || pi > best) {
            best_factor = factor;
            best = pi;
        }
    }
    if (!best_factor) return std::nullopt;
    return b.situation.assignments.at(*best_factor);
}

inline Explanation generate_explanation(const PredictionBreakdown& b, Scenario scenario,
                                        const DisplayNames& names = {}) {
    if (b.feature_rating.empty()) throw InvalidArgument("featureless breakdown cannot be explained");
    Explanation e;
    e.scenario = scenario;
    e.cd = most_influential_condition(b);

    const auto desc = detail::by_rating_desc(b);
    const auto asc = detail::by_rating_asc(b);
    switch (scenario) {
        case Scenario::StrongRecommendation:
            e.at1 = desc[0].first;
            if (desc.size() > 1) e.at2 = desc[1].first;
            break;
        case Scenario::WeakRecommendation:
            e.at1 = desc[0].first;
            for (const auto& [f, _] : asc) {
                if (f != e.at1) {
                    e.at2 = f;
                    break;
                }
            }
            break;
        case Scenario::NotRecommended:
            e.at1 = asc[0].first;
            if (asc.size() > 1) e.at2 = asc[1].first;
            break;
    }

    const std::string& a1 = detail::display(names, e.at1);
    std::string text = e.cd ? "When " + detail::display(names, *e.cd) + ", we" : "We";
    switch (scenario) {
        case Scenario::StrongRecommendation:
            text += " recommend you this item because you like " + a1;
            if (e.at2) text += " and " + detail::display(names, *e.at2);
            break;
        case Scenario::WeakRecommendation:
            text += " recommend you this item because you like " + a1;
            if (e.at2) text += " although you dislike " + detail::display(names, *e.at2);
            break;
        case Scenario::NotRecommended:
            text += " do not recommend you this item because you dislike " + a1;
            if (e.at2) text += " and " + detail::display(names, *e.at2);
            break;
    }
    e.rendered = text + ".";
    return e;
}

inline nlohmann::json to_json(const Explanation& e) {
    nlohmann::json j;
    j["scenario"] = to_string(e.scenario);
    j["cd"] = e.cd ? nlohmann::json(*e.cd) : nlohmann::json(nullptr);
    j["at1"] = e.at1;
    j["at2"] = e.at2 ? nlohmann::json(*e.at2) : nlohmann::json(nullptr);
    j["rendered"] = e.rendered;
    return j;
}

}  // namespace cafata

#endif  // CAFATA_EXPLANATION_HPP
