#ifndef CAFATA_EVALUATION_HPP
#define CAFATA_EVALUATION_HPP

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cafata/data.hpp"
#include "cafata/errors.hpp"
#include "cafata/model.hpp"

namespace cafata {

struct ErrorMetrics {
    double rmse = 0.0;
    double mae = 0.0;
};

inline ErrorMetrics rmse_mae(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw InvalidArgument("prediction/target length mismatch");
    if (predictions.empty()) throw InvalidArgument("no predictions to score");
    double se = 0.0, ae = 0.0;
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        const double err = predictions[k] - targets[k];
        se += err * err;
        ae += std::abs(err);
    }
    const auto n = static_cast<double>(predictions.size());
    return {std::sqrt(se / n), ae / n};
}

/// Inclusive threshold: v >= threshold is positive.
inline std::vector<bool> binarize(std::span<const double> values, double threshold) {
    std::vector<bool> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v >= threshold);
    return out;
}

struct ClassificationMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Micro-averaged over all rows; a zero denominator yields 0.
inline ClassificationMetrics classification_metrics(const std::vector<bool>& predicted,
                                                    const std::vector<bool>& actual) {
    if (predicted.size() != actual.size()) throw InvalidArgument("prediction/target length mismatch");
    if (predicted.empty()) throw InvalidArgument("no predictions to score");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        if (predicted[k] && actual[k]) ++tp;
        else if (predicted[k]) ++fp;
        else if (actual[k]) ++fn;
    }
    ClassificationMetrics m;
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t n = 0;
    double threshold = 0.0;
};

/// Predicts every interaction, maps predictions back to the original scale
/// and scores them. Unseen ids fall back to the zero rows.
inline MetricsReport evaluate_model(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                                    std::span<const RawInteraction> rows, const RatingScale& scale,
                                    ModelVariant variant, double threshold,
                                    LookupMode mode = LookupMode::Lenient) {
    if (rows.empty()) throw InvalidArgument("empty test set");
    std::vector<double> predicted, actual;
    predicted.reserve(rows.size());
    actual.reserve(rows.size());
    for (const auto& r : rows) {
        const auto b = predict(space, catalog, r.user, r.item, r.situation, variant, mode);
        predicted.push_back(scale.to_original(b.rating_hat));
        actual.push_back(r.rating);
    }
    const auto err = rmse_mae(predicted, actual);
    const auto cls = classification_metrics(binarize(predicted, threshold), binarize(actual, threshold));
    MetricsReport report{err.rmse, err.mae, cls.precision, cls.recall, cls.f1, rows.size(), threshold};
    if (report.rmse + 1e-12 < report.mae) throw NumericalError("RMSE below MAE; metrics are corrupt");
    return report;
}

inline nlohmann::json to_json(const MetricsReport& m) {
    return {{"rmse", m.rmse}, {"mae", m.mae},     {"precision", m.precision}, {"recall", m.recall},
            {"f1", m.f1},     {"n", m.n},         {"threshold", m.threshold}};
}

inline std::string format_table(const MetricsReport& m) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "metric     value\n"
                  "rmse       %.6f\n"
                  "mae        %.6f\n"
                  "precision  %.6f\n"
                  "recall     %.6f\n"
                  "f1         %.6f\n"
                  "n          %zu\n"
                  "threshold  %.6f\n",
                  m.rmse, m.mae, m.precision, m.recall, m.f1, m.n, m.threshold);
    return buf;
}

}  // namespace cafata

#endif  // CAFATA_EVALUATION_HPP
