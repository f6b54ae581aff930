#ifndef CAFATA_TOOLS_CLI_HPP
#define CAFATA_TOOLS_CLI_HPP

// Command-line front end. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cafata/cafata.hpp"

namespace cafata::cli {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Where interactions come from: a pre-ingested dataset or raw CSVs.
struct DataArgs {
    std::string dataset;
    std::string interactions;
    std::string features;
    bool log_transform = false;
    std::size_t k_core = 1;
    bool users_only = false;
    std::optional<double> scale_min;
    std::optional<double> scale_max;
};

struct RunConfig {
    DataArgs data;
    std::string model;
    std::string out;
    std::uint64_t seed = 0;

    TrainingConfig training;
    std::string variant = "ca-fata";
    bool dense_reg = false;

    std::string partition = "test";
    std::optional<double> threshold;

    std::string user;
    std::string item;
    std::vector<std::string> contexts;
    double tau_pos = 0.2;
    double tau_neg = 0.0;
    std::string names;
    bool json = false;
    double eps_neutral = 0.0;
    std::string json_out;

    std::size_t k = 4;
    std::size_t k_max = 10;
    std::size_t max_iters = 100;

    std::size_t trials = 100;
    double h = 1e-6;
    double gc_lambda = 0.01;
    double tolerance = 1e-5;
    std::string precision = "double";
};

namespace detail {

inline void add_data_options(CLI::App* cmd, DataArgs& d) {
    cmd->add_option("--dataset", d.dataset, "dataset.json written by `ingest`");
    cmd->add_option("--interactions", d.interactions, "interactions CSV");
    cmd->add_option("--features", d.features, "item features CSV");
    cmd->add_flag("--log-transform", d.log_transform, "apply log(1 + r) to ratings");
    cmd->add_option("--kcore", d.k_core, "k-core threshold (1 disables)");
    cmd->add_flag("--users-only", d.users_only, "k-core filter on users only");
    cmd->add_option("--scale-min", d.scale_min, "lower end of the rating scale");
    cmd->add_option("--scale-max", d.scale_max, "upper end of the rating scale");
}

inline void validate_data_args(const DataArgs& d) {
    if (!d.dataset.empty() && !d.interactions.empty()) {
        throw UsageError("--dataset and --interactions are mutually exclusive");
    }
    if (d.dataset.empty() && d.interactions.empty()) {
        throw UsageError("one of --dataset or --interactions is required");
    }
    if (!d.dataset.empty() && (!d.features.empty() || d.log_transform || d.k_core != 1 || d.users_only ||
                               d.scale_min || d.scale_max)) {
        throw UsageError("preprocessing flags only apply to --interactions input");
    }
    if (d.scale_min.has_value() != d.scale_max.has_value()) {
        throw UsageError("--scale-min and --scale-max must be given together");
    }
    if (d.k_core == 0) throw UsageError("--kcore must be at least 1");
}

inline Dataset load_data(const DataArgs& d, std::uint64_t seed, std::ostream& err) {
    if (!d.dataset.empty()) return load_dataset(d.dataset);
    IngestOptions opt;
    opt.log_transform = d.log_transform;
    opt.k_core = d.k_core;
    opt.k_core_mode = d.users_only ? KCoreMode::UsersOnly : KCoreMode::Symmetric;
    if (d.scale_min) opt.scale = RatingScale{*d.scale_min, *d.scale_max};
    opt.seed = seed;
    IngestReport rep;
    auto catalog = d.features.empty() ? ItemFeatureMap{} : load_item_features(d.features);
    auto ds = ingest(load_interactions(d.interactions), std::move(catalog), opt, &rep);
    err << "loaded " << rep.loaded << " interactions, dropped " << rep.dropped_uncatalogued
        << " uncatalogued and " << rep.dropped_k_core << " by k-core\n";
    return ds;
}

inline std::string describe_schema(const FactorSchema& schema) {
    std::string s;
    for (const auto& [f, conds] : schema) {
        if (!s.empty()) s += ", ";
        s += f + "{";
        bool first = true;
        for (const auto& c : conds) {
            if (!first) s += ",";
            s += c;
            first = false;
        }
        s += "}";
    }
    return s.empty() ? "(no factors)" : s;
}

/// Parses "f=c[,f=c...]" into `situation`, checking factors against the schema.
inline void parse_context(const std::string& text, const FactorSchema& schema, ContextualSituation& situation,
                          std::ostream& err) {
    std::stringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
            throw UsageError("malformed context '" + pair + "', expected factor=condition");
        }
        const auto factor = pair.substr(0, eq);
        const auto condition = pair.substr(eq + 1);
        const auto it = schema.find(factor);
        if (it == schema.end()) {
            throw UsageError("unknown factor '" + factor + "'; schema: " + describe_schema(schema));
        }
        if (!it->second.count(condition)) {
            err << "warning: condition '" << condition << "' unseen for factor '" << factor
                << "', using the neutral representation\n";
        }
        try {
            situation.assign(factor, condition);
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
    }
}

inline void warn_unknown(const ModelBundle& m, const std::string& user, const std::string& item,
                         std::ostream& err) {
    if (!m.space.users().find(user)) {
        err << "warning: unknown user '" << user << "', using the neutral representation\n";
    }
    const bool known_item = m.variant == ModelVariant::Mf ? m.space.items().find(item).has_value()
                                                          : m.catalog.contains(item);
    if (!known_item) err << "warning: unknown item '" << item << "'\n";
}

inline DisplayNames load_names(const std::string& path) {
    DisplayNames names;
    if (path.empty()) return names;
    auto in = cafata::detail::open_input(path);
    std::string line;
    std::size_t row = 0;
    if (!cafata::detail::next_record(in, line, row)) throw DataError("empty names file '" + path + "'");
    const auto header = cafata::detail::split_csv_line(line);
    const auto id_col = cafata::detail::require_column(header, "id");
    const auto name_col = cafata::detail::require_column(header, "name");
    while (cafata::detail::next_record(in, line, row)) {
        const auto cells = cafata::detail::split_csv_line(line);
        if (cells.size() != header.size()) throw DataError("wrong number of columns", row);
        names[cells[id_col]] = cells[name_col];
    }
    return names;
}

inline std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

inline void write_file(const fs::path& path, const std::string& text) { cafata::detail::write_text(path, text); }

}  // namespace detail

inline void cmd_ingest(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto ds = detail::load_data(c.data, c.seed, err);
    const auto path = fs::path(c.out) / "dataset.json";
    save_dataset(path, ds);
    out << "train " << ds.train.size() << ", val " << ds.val.size() << ", test " << ds.test.size()
        << ", scale [" << ds.scale.min << ", " << ds.scale.max << "] -> " << path.string() << '\n';
}

inline void cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto ds = detail::load_data(c.data, c.seed, err);
    auto cfg = c.training;
    cfg.variant = parse_variant(c.variant);
    cfg.seed = c.seed;
    cfg.regularization = c.dense_reg ? Regularization::Dense : Regularization::Sparse;
    const auto result = train(ds, cfg);

    const ModelBundle bundle{result.space, ds.catalog, ds.schema, ds.factors, ds.scale, cfg.variant};
    const fs::path dir(c.out);
    save_model(dir / "model.json", bundle);
    std::ostringstream hist;
    write_history_csv(hist, result.history);
    detail::write_file(dir / "history.csv", hist.str());

    double best = result.initial_val_rmse;
    for (const auto& h : result.history) best = std::min(best, h.val_rmse);
    out << "epochs " << result.history.size() << ", best epoch " << result.best_epoch << ", val_rmse "
        << detail::fixed6(best) << " (normalized) -> " << (dir / "model.json").string() << '\n';
}

inline void cmd_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto bundle = load_model(c.model);
    const auto ds = detail::load_data(c.data, c.seed, err);
    const std::vector<RawInteraction>* rows = &ds.test;
    if (c.partition == "val") rows = &ds.val;
    else if (c.partition == "train") rows = &ds.train;

    double threshold = 0.0;
    if (c.threshold) {
        threshold = *c.threshold;
    } else {
        if (ds.train.empty()) throw InvalidArgument("empty training partition; pass --threshold");
        for (const auto& r : ds.train) threshold += r.rating;
        threshold /= static_cast<double>(ds.train.size());
    }
    const auto report = evaluate_model(bundle.space, bundle.catalog, *rows, bundle.scale, bundle.variant, threshold);
    out << format_table(report);
    if (!c.out.empty()) {
        detail::write_file(fs::path(c.out) / "metrics.json", to_json(report).dump(1) + "\n");
    }
}

inline void cmd_predict(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto bundle = load_model(c.model);
    std::vector<std::pair<std::string, ContextualSituation>> situations;
    if (c.contexts.empty()) situations.emplace_back("(none)", ContextualSituation{});
    for (const auto& text : c.contexts) {
        ContextualSituation s;
        detail::parse_context(text, bundle.schema, s, err);
        situations.emplace_back(text, std::move(s));
    }
    detail::warn_unknown(bundle, c.user, c.item, err);

    nlohmann::json rows = nlohmann::json::array();
    std::size_t width = 9;
    for (const auto& [label, _] : situations) width = std::max(width, label.size());
    if (!c.json) {
        out << std::string("situation") + std::string(width - 9 + 2, ' ') << "rating_hat  rating\n";
    }
    for (const auto& [label, s] : situations) {
        const auto b = predict(bundle.space, bundle.catalog, c.user, c.item, s, bundle.variant, LookupMode::Lenient);
        const double original = bundle.scale.to_original(b.rating_hat);
        if (c.json) {
            rows.push_back({{"context", s.assignments}, {"rating_hat", b.rating_hat},
                            {"rating", original}, {"no_evidence", b.no_evidence}});
        } else {
            auto rh = detail::fixed6(b.rating_hat);
            out << label << std::string(width - label.size() + 2, ' ') << rh
                << std::string(rh.size() < 12 ? 12 - rh.size() : 1, ' ') << detail::fixed6(original) << '\n';
        }
    }
    if (c.json) out << nlohmann::json{{"user", c.user}, {"item", c.item}, {"predictions", rows}}.dump(1) << '\n';
}

inline PredictionBreakdown breakdown_for(const RunConfig& c, const ModelBundle& bundle, std::ostream& err) {
    ContextualSituation s;
    for (const auto& text : c.contexts) detail::parse_context(text, bundle.schema, s, err);
    detail::warn_unknown(bundle, c.user, c.item, err);
    return predict(bundle.space, bundle.catalog, c.user, c.item, s, bundle.variant, LookupMode::Lenient);
}

inline void cmd_explain(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto bundle = load_model(c.model);
    const auto names = detail::load_names(c.names);
    const auto b = breakdown_for(c, bundle, err);
    if (b.feature_rating.empty()) throw InvalidArgument("item '" + c.item + "' has no features to explain");
    const auto e = generate_explanation(b, classify_scenario(b, c.tau_pos, c.tau_neg), names);
    if (c.json) {
        auto j = to_json(e);
        j["rating_hat"] = b.rating_hat;
        out << j.dump(1) << '\n';
    } else {
        out << e.rendered << '\n';
    }
}

inline void cmd_export_taf(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto bundle = load_model(c.model);
    const auto taf = build_taf(breakdown_for(c, bundle, err), c.eps_neutral);
    const auto dot = export_dot(taf);
    if (c.out.empty()) out << dot;
    else detail::write_file(c.out, dot);
    if (!c.json_out.empty()) detail::write_file(c.json_out, to_json(taf).dump(1) + "\n");
}

inline void cmd_cluster(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto bundle = load_model(c.model);
    const auto m = bundle.factors.empty() ? importance_matrix(bundle.space, bundle.schema)
                                          : importance_matrix(bundle.space, bundle.factors);
    const auto km = kmeans_cluster(m.rows, c.k, c.seed, c.max_iters);
    const fs::path dir(c.out);

    std::ostringstream assignments, centroids, inertia;
    write_assignments_csv(assignments, m.users, km.assignments);
    write_profiles_csv(centroids, m.factors, cluster_profiles(m.rows, km.assignments, c.k));
    inertia.precision(std::numeric_limits<double>::max_digits10);
    inertia << "k,inertia\n";
    const auto curve = inertia_by_k(m.rows, c.k_max, c.seed, c.max_iters);
    for (std::size_t k = 0; k < curve.size(); ++k) inertia << k + 1 << ',' << curve[k] << '\n';
    detail::write_file(dir / "assignments.csv", assignments.str());
    detail::write_file(dir / "centroids.csv", centroids.str());
    detail::write_file(dir / "inertia.csv", inertia.str());
    try {
        const auto proj = project_2d(m.rows);
        std::ostringstream coords;
        write_coords_csv(coords, m.users, km.assignments, proj.coords);
        detail::write_file(dir / "coords.csv", coords.str());
    } catch (const InvalidArgument& e) {
        err << "warning: no 2-D projection written: " << e.what() << '\n';
    }
    out << m.users.size() << " users in " << c.k << " clusters, inertia " << detail::fixed6(km.inertia) << " -> "
        << dir.string() << '\n';
}

/// Returns false when the tolerance is exceeded.
inline bool cmd_gradcheck(const RunConfig& c, std::ostream& out) {
    GradientSweepOptions opt;
    opt.trials = c.trials;
    opt.seed = c.seed;
    opt.h = c.h;
    opt.l2_lambda = c.gc_lambda;
    if (c.variant != "all") opt.variants = {parse_variant(c.variant)};
    const auto r = c.precision == "long-double" ? gradient_sweep<long double>(opt) : gradient_sweep<double>(opt);
    char buf[128];
    for (const auto& [v, e] : r.per_variant) {
        std::snprintf(buf, sizeof buf, "%-12s max_rel_err %.3e\n", to_string(v).c_str(), e);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%zu models, %zu coordinates checked, %zu excluded, max_rel_err %.3e (tol %.1e)\n",
                  r.models, r.coordinates_checked, r.coordinates_excluded, r.max_relative_error, c.tolerance);
    out << buf;
    return r.max_relative_error <= c.tolerance;
}

/// Parses argv and runs one subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Context-aware feature attribution recommender"};
    app.require_subcommand(1);
    RunConfig c;
    const std::vector<std::string> variants{"ca-fata", "fata", "avg-ca-fata", "avg-fata", "mf"};

    auto* ingest_cmd = app.add_subcommand("ingest", "preprocess and split raw CSVs into dataset.json");
    detail::add_data_options(ingest_cmd, c.data);
    ingest_cmd->add_option("--seed", c.seed, "split seed");
    ingest_cmd->add_option("--out", c.out, "output directory")->required();

    auto* train_cmd = app.add_subcommand("train", "train a model");
    detail::add_data_options(train_cmd, c.data);
    train_cmd->add_option("--variant", c.variant, "model variant")->check(CLI::IsMember(variants));
    train_cmd->add_option("--seed", c.seed, "seed for split, initialization and shuffling");
    train_cmd->add_option("--dim", c.training.dimension, "embedding dimension");
    train_cmd->add_option("--lr", c.training.learning_rate, "Adam learning rate");
    train_cmd->add_option("--batch", c.training.batch_size, "mini-batch size");
    train_cmd->add_option("--lambda", c.training.l2_lambda, "L2 weight");
    train_cmd->add_option("--epochs", c.training.max_epochs, "maximum epochs");
    train_cmd->add_option("--patience", c.training.patience, "early-stopping patience");
    train_cmd->add_option("--leaky-slope", c.training.leaky_slope, "LeakyReLU negative slope");
    train_cmd->add_option("--init-stddev", c.training.init_stddev, "initialization standard deviation");
    train_cmd->add_flag("--dense-reg", c.dense_reg, "regularize every vector, not only the batch's");
    train_cmd->add_option("--out", c.out, "output directory")->required();

    auto* eval_cmd = app.add_subcommand("evaluate", "score a model on a partition");
    eval_cmd->add_option("--model", c.model, "model.json")->required();
    detail::add_data_options(eval_cmd, c.data);
    eval_cmd->add_option("--seed", c.seed, "split seed (CSV input)");
    eval_cmd->add_option("--partition", c.partition, "train, val or test")
        ->check(CLI::IsMember({"train", "val", "test"}));
    eval_cmd->add_option("--threshold", c.threshold, "binarization threshold (default: mean training rating)");
    eval_cmd->add_option("--out", c.out, "directory for metrics.json");

    const auto add_query = [&](CLI::App* cmd, const char* context_help) {
        cmd->add_option("--model", c.model, "model.json")->required();
        cmd->add_option("--user", c.user, "user id")->required();
        cmd->add_option("--item", c.item, "item id")->required();
        cmd->add_option("--context", c.contexts, context_help);
    };
    auto* predict_cmd = app.add_subcommand("predict", "predict a rating, one row per --context");
    add_query(predict_cmd, "situation factor=condition[,factor=condition]; repeat to compare situations");
    predict_cmd->add_flag("--json", c.json, "print JSON");

    auto* explain_cmd = app.add_subcommand("explain", "render a textual explanation");
    add_query(explain_cmd, "factor=condition; repeat for several factors");
    explain_cmd->add_option("--tau-pos", c.tau_pos, "strong-recommendation threshold");
    explain_cmd->add_option("--tau-neg", c.tau_neg, "not-recommended threshold");
    explain_cmd->add_option("--names", c.names, "CSV with id,name columns for display");
    explain_cmd->add_flag("--json", c.json, "print JSON");

    auto* taf_cmd = app.add_subcommand("export-taf", "export the argumentation framework of a prediction");
    add_query(taf_cmd, "factor=condition; repeat for several factors");
    taf_cmd->add_option("--eps-neutral", c.eps_neutral, "|P| at or below this is neutral");
    taf_cmd->add_option("--out", c.out, "DOT file (default: standard output)");
    taf_cmd->add_option("--json", c.json_out, "also write the framework as JSON");

    auto* cluster_cmd = app.add_subcommand("cluster", "cluster users by contextual factor importance");
    cluster_cmd->add_option("--model", c.model, "model.json")->required();
    cluster_cmd->add_option("--k", c.k, "number of clusters");
    cluster_cmd->add_option("--k-max", c.k_max, "largest k of the inertia curve");
    cluster_cmd->add_option("--max-iters", c.max_iters, "Lloyd iterations");
    cluster_cmd->add_option("--seed", c.seed, "k-means++ seed");
    cluster_cmd->add_option("--out", c.out, "output directory")->required();

    auto* gc_cmd = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
    gc_cmd->add_option("--trials", c.trials, "random models per variant");
    gc_cmd->add_option("--seed", c.seed, "model seed");
    gc_cmd->add_option("--step", c.h, "finite-difference step h");
    gc_cmd->add_option("--lambda", c.gc_lambda, "L2 weight");
    gc_cmd->add_option("--tolerance", c.tolerance, "maximum relative error");
    gc_cmd->add_option("--precision", c.precision, "finite-difference precision")
        ->check(CLI::IsMember({"double", "long-double"}));
    gc_cmd->add_option("--variant", c.variant, "variant or 'all'");

    bool gradcheck_variant_set = false;
    try {
        app.parse(argc, argv);
        gradcheck_variant_set = gc_cmd->count("--variant") > 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*ingest_cmd || *train_cmd || *eval_cmd) detail::validate_data_args(c.data);
        if (*gc_cmd) {
            if (!gradcheck_variant_set) c.variant = "all";
            if (c.variant != "all" && std::find(variants.begin(), variants.end(), c.variant) == variants.end()) {
                throw UsageError("unknown variant '" + c.variant + "'");
            }
            if (c.trials == 0) throw UsageError("--trials must be at least 1");
        }
        if (*cluster_cmd && c.k == 0) throw UsageError("--k must be at least 1");
        if (*explain_cmd && c.tau_neg > c.tau_pos) throw UsageError("--tau-neg must not exceed --tau-pos");
        if (*train_cmd) {
            auto cfg = c.training;
            try {
                cfg.validate();
            } catch (const InvalidArgument& e) {
                throw UsageError(e.what());
            }
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*ingest_cmd) cmd_ingest(c, out, err);
        else if (*train_cmd) cmd_train(c, out, err);
        else if (*eval_cmd) cmd_evaluate(c, out, err);
        else if (*predict_cmd) cmd_predict(c, out, err);
        else if (*explain_cmd) cmd_explain(c, out, err);
        else if (*taf_cmd) cmd_export_taf(c, out, err);
        else if (*cluster_cmd) cmd_cluster(c, out, err);
        else if (*gc_cmd) return cmd_gradcheck(c, out) ? 0 : 1;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace cafata::cli

#endif  // CAFATA_TOOLS_CLI_HPP
