#ifndef CAFATA_TRAINING_HPP
#define CAFATA_TRAINING_HPP

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cafata/data.hpp"
#include "cafata/embedding_space.hpp"
#include "cafata/errors.hpp"
#include "cafata/model.hpp"
#include "cafata/synthetic.hpp"

namespace cafata {

/// A training target on the normalized [-1, 1] scale.
struct Sample {
    std::string user;
    std::string item;
    ContextualSituation situation;
    double rating = 0.0;
};

inline std::vector<Sample> to_samples(std::span<const RawInteraction> rows, const RatingScale& scale) {
    std::vector<Sample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.user, r.item, r.situation, scale.to_normalized(r.rating)});
    return out;
}

enum class Regularization {
    Sparse,  ///< lambda * |v|^2 for each vector the batch touches
    Dense,   ///< lambda * |v|^2 for every trainable vector
};

struct TrainingConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 512;
    double l2_lambda = 1e-4;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    std::uint64_t seed = 0;
    ModelVariant variant = ModelVariant::CaFata;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t dimension = 32;
    double leaky_slope = 0.2;
    double init_stddev = 0.1;
    Regularization regularization = Regularization::Sparse;

    void validate() const {
        // 0 freezes the parameters; anything else must sit in the tuning grid's range.
        if (!(learning_rate == 0.0 || (learning_rate >= 1e-5 && learning_rate <= 1e-1))) {
            throw InvalidArgument("learning_rate must be 0 or lie in [1e-5, 1e-1]");
        }
        if (batch_size == 0) throw InvalidArgument("batch_size must be at least 1");
        if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) throw InvalidArgument("l2_lambda must be >= 0");
        if (max_epochs == 0) throw InvalidArgument("max_epochs must be at least 1");
        if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
            throw InvalidArgument("Adam betas must lie in (0, 1)");
        }
        if (!(adam_eps > 0.0)) throw InvalidArgument("adam_eps must be positive");
        if (dimension == 0) throw InvalidArgument("dimension must be positive");
        if (!(init_stddev >= 0.0)) throw InvalidArgument("init_stddev must be >= 0");
    }
};

/// Sparse dL/dv for the rows a batch touched.
class GradientSet {
public:
    explicit GradientSet(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }

    /// Zero-initialized on first access.
    Vector& at(TableKind kind, std::size_t row) {
        auto& rows = tables_[static_cast<std::size_t>(kind)];
        auto it = rows.find(row);
        if (it == rows.end()) it = rows.emplace(row, Vector(dim_, 0.0)).first;
        return it->second;
    }

    bool contains(TableKind kind, std::size_t row) const {
        return tables_[static_cast<std::size_t>(kind)].count(row) > 0;
    }

    const std::map<std::size_t, Vector>& rows(TableKind kind) const {
        return tables_[static_cast<std::size_t>(kind)];
    }

    std::size_t touched() const {
        std::size_t n = 0;
        for (const auto& t : tables_) n += t.size();
        return n;
    }

private:
    std::size_t dim_;
    std::array<std::map<std::size_t, Vector>, kTableCount> tables_;
};

/// A sample with its ids already resolved against a space.
struct ResolvedSample {
    ResolvedQuery query;
    double target = 0.0;
};

inline std::vector<ResolvedSample> resolve_samples(const EmbeddingSpace& space,
                                                   const ItemFeatureMap& catalog,
                                                   std::span<const Sample> samples,
                                                   ModelVariant variant,
                                                   LookupMode mode = LookupMode::Strict) {
    std::vector<ResolvedSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back({resolve_query(space, catalog, s.user, s.item, s.situation, variant, mode), s.rating});
    }
    return out;
}

namespace detail {

using RowRef = std::pair<TableKind, std::size_t>;

/// Rows read by the forward pass, excluding the frozen unknown rows.
inline void collect_rows(const ResolvedQuery& q, ModelVariant variant, std::set<RowRef>& out) {
    const auto add = [&](TableKind k, std::size_t r) {
        if (r != EmbeddingTable::unknown_index()) out.emplace(k, r);
    };
    add(TableKind::User, q.user);
    if (variant == ModelVariant::Mf) {
        add(TableKind::Item, q.item);
        return;
    }
    if (uses_context(variant)) {
        for (const auto& c : q.context) {
            add(TableKind::Factor, c.factor);
            add(TableKind::Condition, c.condition);
        }
    }
    for (const auto& g : q.types) {
        if (uses_type_importance(variant)) add(TableKind::Type, g.type);
        for (auto f : g.features) add(TableKind::Feature, f);
    }
}

inline std::set<RowRef> regularized_rows(const EmbeddingSpace& space,
                                         std::span<const ResolvedSample> batch,
                                         ModelVariant variant, Regularization reg) {
    std::set<RowRef> rows;
    if (reg == Regularization::Dense) {
        for (auto kind : kAllTables) {
            for (std::size_t r = 1; r < space.table(kind).size(); ++r) rows.emplace(kind, r);
        }
    } else {
        for (const auto& s : batch) collect_rows(s.query, variant, rows);
    }
    return rows;
}

inline void axpy(double alpha, std::span<const double> x, Vector& y) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

}  // namespace detail

/// Squared error summed over the batch plus lambda * |Theta|^2, evaluated in T.
template <class T = double>
T batch_loss(const EmbeddingSpace& space, std::span<const ResolvedSample> batch, ModelVariant variant,
             double l2_lambda, Regularization reg = Regularization::Sparse) {
    if (batch.empty()) throw InvalidArgument("empty batch");
    T total{};
    for (const auto& s : batch) {
        const T err = forward<T>(space, s.query, variant).rating - static_cast<T>(s.target);
        total += err * err;
    }
    if (l2_lambda > 0.0) {
        T penalty{};
        for (const auto& [kind, r] : detail::regularized_rows(space, batch, variant, reg)) {
            const auto v = space.table(kind).row(r);
            penalty += detail::dot<T>(v, v);
        }
        total += static_cast<T>(l2_lambda) * penalty;
    }
    return total;
}

inline double loss(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                   std::span<const Sample> batch, ModelVariant variant, double l2_lambda,
                   Regularization reg = Regularization::Sparse) {
    if (batch.empty()) throw InvalidArgument("empty batch");
    const auto resolved = resolve_samples(space, catalog, batch, variant);
    return batch_loss<double>(space, resolved, variant, l2_lambda, reg);
}

struct LossAndGradient {
    double loss = 0.0;
    GradientSet gradient;
};

/// Analytic gradient of batch_loss by the chain rule through the forward pass.
inline LossAndGradient backward(const EmbeddingSpace& space, std::span<const ResolvedSample> batch,
                                ModelVariant variant, double l2_lambda,
                                Regularization reg = Regularization::Sparse) {
    if (batch.empty()) throw InvalidArgument("empty batch");
    const std::size_t d = space.dim();
    const double slope = space.leaky_slope();
    LossAndGradient out{0.0, GradientSet(d)};
    auto& grad = out.gradient;
    Vector d_ucs(d);

    for (const auto& s : batch) {
        const auto& q = s.query;
        const auto tr = forward<double>(space, q, variant);
        const double residual = tr.rating - s.target;
        out.loss += residual * residual;
        const double e = 2.0 * residual;
        const auto u = space.users().row(q.user);

        if (variant == ModelVariant::Mf) {
            detail::axpy(e, space.items().row(q.item), grad.at(TableKind::User, q.user));
            detail::axpy(e, u, grad.at(TableKind::Item, q.item));
            continue;
        }
        if (q.types.empty()) continue;

        const std::span<const double> ucs(tr.user_in_context);
        std::fill(d_ucs.begin(), d_ucs.end(), 0.0);
        const std::size_t n_types = q.types.size();

        // Features: dL/dP = e * pi_t / |at_t|.
        for (std::size_t j = 0; j < n_types; ++j) {
            const auto& g = q.types[j];
            const double dp = e * tr.type_importance[j] / static_cast<double>(g.features.size());
            for (auto f : g.features) {
                detail::axpy(dp, ucs, grad.at(TableKind::Feature, f));
                detail::axpy(dp, space.features().row(f), d_ucs);
            }
        }

        // Type importances: softmax Jacobian pi_j (g_j - sum_l pi_l g_l), then LeakyReLU.
        if (uses_type_importance(variant)) {
            double mean = 0.0;
            for (std::size_t j = 0; j < n_types; ++j) {
                mean += tr.type_importance[j] * e * tr.type_contribution[j];
            }
            for (std::size_t j = 0; j < n_types; ++j) {
                const double dy = tr.type_importance[j] * (e * tr.type_contribution[j] - mean);
                const double dscore = dy * leaky_relu_grad(tr.type_scores[j], slope);
                const auto type_row = q.types[j].type;
                detail::axpy(dscore, ucs, grad.at(TableKind::Type, type_row));
                detail::axpy(dscore, space.types().row(type_row), d_ucs);
            }
        }

        auto& du = grad.at(TableKind::User, q.user);
        detail::axpy(1.0, std::span<const double>(d_ucs), du);

        if (uses_context(variant) && !q.context.empty()) {
            const std::size_t n_ctx = q.context.size();
            std::vector<double> h(n_ctx);
            double mean = 0.0;
            for (std::size_t k = 0; k < n_ctx; ++k) {
                const auto cd = space.conditions().row(q.context[k].condition);
                h[k] = detail::dot<double>(std::span<const double>(d_ucs), cd);
                mean += tr.factor_importance[k] * h[k];
                detail::axpy(tr.factor_importance[k], std::span<const double>(d_ucs),
                             grad.at(TableKind::Condition, q.context[k].condition));
            }
            for (std::size_t k = 0; k < n_ctx; ++k) {
                const double dz = tr.factor_importance[k] * (h[k] - mean);
                const double dscore = dz * leaky_relu_grad(tr.factor_scores[k], slope);
                const auto f = q.context[k].factor;
                detail::axpy(dscore, space.factors().row(f), grad.at(TableKind::User, q.user));
                detail::axpy(dscore, u, grad.at(TableKind::Factor, f));
            }
        }
    }

    if (l2_lambda > 0.0) {
        double penalty = 0.0;
        for (const auto& [kind, r] : detail::regularized_rows(space, batch, variant, reg)) {
            const auto v = space.table(kind).row(r);
            penalty += detail::dot<double>(v, v);
            detail::axpy(2.0 * l2_lambda, v, grad.at(kind, r));
        }
        out.loss += l2_lambda * penalty;
    }
    return out;
}

inline GradientSet backward(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                            std::span<const Sample> batch, ModelVariant variant, double l2_lambda,
                            Regularization reg = Regularization::Sparse) {
    if (batch.empty()) throw InvalidArgument("empty batch");
    const auto resolved = resolve_samples(space, catalog, batch, variant);
    return backward(space, resolved, variant, l2_lambda, reg).gradient;
}

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t coordinates_checked = 0;
    std::size_t coordinates_excluded = 0;  // perturbation crossed a LeakyReLU kink
};

namespace detail {

/// Signs of every LeakyReLU input in the batch; a change means a kink was crossed.
inline std::vector<int> kink_signature(const EmbeddingSpace& space,
                                       std::span<const ResolvedSample> batch, ModelVariant variant) {
    std::vector<int> sig;
    const auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
    for (const auto& s : batch) {
        const auto tr = forward<double>(space, s.query, variant);
        for (double x : tr.factor_scores) sig.push_back(sign(x));
        for (double x : tr.type_scores) sig.push_back(sign(x));
    }
    return sig;
}

}  // namespace detail

/// Compares backward() against central differences (L(v + h e_k) - L(v - h e_k)) / 2h
/// for every coordinate of every row with a gradient entry. `Numeric` is the
/// precision the finite-difference losses are evaluated in. Coordinates whose
/// perturbation changes the sign of a LeakyReLU input (or touches one sitting
/// exactly at 0) are excluded.
template <class Numeric = double>
GradientCheckResult gradient_check(EmbeddingSpace space, std::span<const ResolvedSample> batch,
                                   ModelVariant variant, double l2_lambda, double h,
                                   Regularization reg = Regularization::Sparse) {
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    const auto analytic = backward(space, batch, variant, l2_lambda, reg).gradient;
    const auto base_sig = detail::kink_signature(space, batch, variant);

    GradientCheckResult result;
    for (auto kind : kAllTables) {
        for (const auto& [r, g] : analytic.rows(kind)) {
            auto row = space.table(kind).row(r);
            for (std::size_t k = 0; k < row.size(); ++k) {
                const double saved = row[k];
                row[k] = saved + h;
                const bool plus_ok = detail::kink_signature(space, batch, variant) == base_sig;
                const Numeric up = batch_loss<Numeric>(space, batch, variant, l2_lambda, reg);
                row[k] = saved - h;
                const bool minus_ok = detail::kink_signature(space, batch, variant) == base_sig;
                const Numeric down = batch_loss<Numeric>(space, batch, variant, l2_lambda, reg);
                row[k] = saved;
                if (!plus_ok || !minus_ok) {
                    ++result.coordinates_excluded;
                    continue;
                }
                const double numeric = static_cast<double>((up - down) / static_cast<Numeric>(2.0 * h));
                const double denom = std::max({std::abs(g[k]), std::abs(numeric), 1e-8});
                result.max_relative_error =
                    std::max(result.max_relative_error, std::abs(g[k] - numeric) / denom);
                ++result.coordinates_checked;
            }
        }
    }
    return result;
}

template <class Numeric = double>
GradientCheckResult gradient_check(const EmbeddingSpace& space, const ItemFeatureMap& catalog,
                                   std::span<const Sample> batch, ModelVariant variant,
                                   double l2_lambda, double h,
                                   Regularization reg = Regularization::Sparse) {
    const auto resolved = resolve_samples(space, catalog, batch, variant);
    return gradient_check<Numeric>(space, resolved, variant, l2_lambda, h, reg);
}

struct GradientSweepOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::vector<std::size_t> dims = {1, 4, 8};
    std::vector<ModelVariant> variants = {ModelVariant::CaFata, ModelVariant::Fata, ModelVariant::AvgCaFata,
                                          ModelVariant::AvgFata, ModelVariant::Mf};
    double l2_lambda = 0.01;
    double h = 1e-6;
};

struct GradientSweepResult {
    double max_relative_error = 0.0;
    std::map<ModelVariant, double> per_variant;
    std::size_t models = 0;
    std::size_t coordinates_checked = 0;
    std::size_t coordinates_excluded = 0;
};

/// Gradient check over `trials` random models per variant, cycling through
/// `dims` and alternating sparse/dense regularization.
template <class Numeric = double>
GradientSweepResult gradient_sweep(const GradientSweepOptions& opt) {
    if (opt.dims.empty() || opt.variants.empty()) throw InvalidArgument("empty gradient sweep");
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> target(-1.0, 1.0);
    GradientSweepResult out;
    for (std::size_t t = 0; t < opt.trials; ++t) {
        for (auto variant : opt.variants) {
            RandomInstanceOptions io;
            io.dim = opt.dims[t % opt.dims.size()];
            io.neutral_probability = 0.0;
            auto inst = random_instance(rng, io);
            if (variant == ModelVariant::Mf) inst.space.add_random(TableKind::Item, inst.item, rng, io.stddev);
            const std::vector<Sample> batch{{inst.user, inst.item, inst.situation, target(rng)}};
            const auto reg = t % 2 == 0 ? Regularization::Sparse : Regularization::Dense;
            const auto r = gradient_check<Numeric>(inst.space, inst.catalog, batch, variant, opt.l2_lambda,
                                                   opt.h, reg);
            out.max_relative_error = std::max(out.max_relative_error, r.max_relative_error);
            auto& pv = out.per_variant[variant];
            pv = std::max(pv, r.max_relative_error);
            out.coordinates_checked += r.coordinates_checked;
            out.coordinates_excluded += r.coordinates_excluded;
            ++out.models;
        }
    }
    return out;
}

/// Adam with lazy row updates: only rows present in the gradient move, the
/// step counter is global.
class AdamOptimizer {
public:
    AdamOptimizer(const EmbeddingSpace& space, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8)
        : beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (auto kind : kAllTables) {
            const auto n = space.table(kind).data().size();
            first_[static_cast<std::size_t>(kind)].assign(n, 0.0);
            second_[static_cast<std::size_t>(kind)].assign(n, 0.0);
        }
    }

    std::size_t steps() const noexcept { return step_; }

    void step(EmbeddingSpace& space, const GradientSet& grad, double learning_rate) {
        ++step_;
        const double t = static_cast<double>(step_);
        const double bias1 = 1.0 - std::pow(beta1_, t);
        const double bias2 = 1.0 - std::pow(beta2_, t);
        const std::size_t d = space.dim();
        for (auto kind : kAllTables) {
            auto& m = first_[static_cast<std::size_t>(kind)];
            auto& v = second_[static_cast<std::size_t>(kind)];
            auto& table = space.table(kind);
            for (const auto& [r, g] : grad.rows(kind)) {
                auto row = table.row(r);
                for (std::size_t k = 0; k < d; ++k) {
                    const std::size_t idx = r * d + k;
                    m[idx] = beta1_ * m[idx] + (1.0 - beta1_) * g[k];
                    v[idx] = beta2_ * v[idx] + (1.0 - beta2_) * g[k] * g[k];
                    const double m_hat = m[idx] / bias1;
                    const double v_hat = v[idx] / bias2;
                    row[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + eps_);
                }
            }
        }
    }

private:
    double beta1_, beta2_, eps_;
    std::size_t step_ = 0;
    std::array<Vector, kTableCount> first_;
    std::array<Vector, kTableCount> second_;
};

/// Root mean squared error of the model on resolved samples (normalized scale).
inline double rmse_on(const EmbeddingSpace& space, std::span<const ResolvedSample> samples,
                      ModelVariant variant) {
    if (samples.empty()) throw InvalidArgument("empty sample set");
    double sse = 0.0;
    for (const auto& s : samples) {
        const double err = forward<double>(space, s.query, variant).rating - s.target;
        sse += err * err;
    }
    return std::sqrt(sse / static_cast<double>(samples.size()));
}

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // objective summed over the epoch's batches, divided by |train|
    double val_rmse = 0.0;    // normalized scale
};

struct TrainResult {
    EmbeddingSpace space;  // snapshot with the best validation RMSE
    std::vector<EpochRecord> history;
    double initial_val_rmse = 0.0;
    std::size_t best_epoch = 0;  // 0 when no epoch beat the initialization
};

/// Mini-batch Adam on the regularized squared loss with early stopping on
/// validation RMSE. Single-threaded and deterministic for a given seed.
inline TrainResult train(EmbeddingSpace space, const ItemFeatureMap& catalog,
                         std::span<const Sample> train_set, std::span<const Sample> val_set,
                         const TrainingConfig& config) {
    config.validate();
    if (train_set.empty()) throw InvalidArgument("empty training partition");
    if (val_set.empty()) throw InvalidArgument("empty validation partition");

    const auto variant = config.variant;
    const auto train_resolved = resolve_samples(space, catalog, train_set, variant);
    const auto val_resolved = resolve_samples(space, catalog, val_set, variant, LookupMode::Lenient);

    AdamOptimizer adam(space, config.adam_beta1, config.adam_beta2, config.adam_eps);
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train_resolved.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<ResolvedSample> batch;
    batch.reserve(config.batch_size);

    TrainResult result{space, {}, rmse_on(space, val_resolved, variant), 0};
    double best = result.initial_val_rmse;
    std::size_t stale = 0;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0, b = 0; start < order.size(); start += config.batch_size, ++b) {
            const auto stop = std::min(order.size(), start + config.batch_size);
            batch.clear();
            for (auto i = start; i < stop; ++i) batch.push_back(train_resolved[order[i]]);
            const auto lg = backward(space, batch, variant, config.l2_lambda, config.regularization);
            if (!std::isfinite(lg.loss)) {
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                                     ", batch " + std::to_string(b));
            }
            epoch_loss += lg.loss;
            adam.step(space, lg.gradient, config.learning_rate);
        }
        const double val = rmse_on(space, val_resolved, variant);
        if (!std::isfinite(val)) {
            throw NumericalError("non-finite validation RMSE at epoch " + std::to_string(epoch));
        }
        result.history.push_back({epoch, epoch_loss / static_cast<double>(order.size()), val});
        if (val < best) {
            best = val;
            result.best_epoch = epoch;
            result.space = space;
            stale = 0;
        } else if (++stale >= config.patience) {
            break;
        }
    }
    return result;
}

/// Fresh space for `dataset`: users and items of the training partition,
/// every factor and condition of the schema, every type and feature of the
/// catalogue. Rows are drawn in sorted id order from one seeded generator.
inline EmbeddingSpace initialize_space(const Dataset& dataset, const TrainingConfig& config) {
    EmbeddingSpace space(config.dimension, config.leaky_slope, config.seed);
    std::mt19937_64 rng(config.seed);
    std::set<std::string> users, items;
    for (const auto& r : dataset.train) {
        users.insert(r.user);
        items.insert(r.item);
    }
    for (const auto& u : users) space.add_random(TableKind::User, u, rng, config.init_stddev);
    for (const auto& [factor, conditions] : dataset.schema) {
        space.add_random(TableKind::Factor, factor, rng, config.init_stddev);
        for (const auto& c : conditions) {
            space.add_random(TableKind::Condition, condition_key(factor, c), rng, config.init_stddev);
        }
    }
    for (const auto& t : dataset.catalog.all_types()) {
        space.add_random(TableKind::Type, t, rng, config.init_stddev);
    }
    for (const auto& f : dataset.catalog.all_features()) {
        space.add_random(TableKind::Feature, f, rng, config.init_stddev);
    }
    if (config.variant == ModelVariant::Mf) {
        for (const auto& i : items) space.add_random(TableKind::Item, i, rng, config.init_stddev);
    }
    return space;
}

inline TrainResult train(const Dataset& dataset, const TrainingConfig& config) {
    config.validate();
    if (dataset.train.empty() || dataset.val.empty()) {
        throw InvalidArgument("dataset needs non-empty train and validation partitions");
    }
    const auto train_set = to_samples(dataset.train, dataset.scale);
    const auto val_set = to_samples(dataset.val, dataset.scale);
    return train(initialize_space(dataset, config), dataset.catalog, train_set, val_set, config);
}

inline void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
    out << "epoch,train_loss,val_rmse\n";
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& h : history) out << h.epoch << ',' << h.train_loss << ',' << h.val_rmse << '\n';
    out.precision(old);
}

}  // namespace cafata

#endif  // CAFATA_TRAINING_HPP
