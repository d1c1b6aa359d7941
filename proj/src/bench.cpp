#include "srf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "srf/metrics.hpp"
#include "srf/rng.hpp"
#include "srf/smooth.hpp"

namespace srf {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::rf_base: return "rf";
        case ModelKind::srf_global: return "srf-global";
        case ModelKind::srf_local: return "srf-local";
        case ModelKind::rf_large: return "rf-large";
    }
    throw std::logic_error("unreachable");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "rf") return ModelKind::rf_base;
    if (name == "srf-global") return ModelKind::srf_global;
    if (name == "srf-local") return ModelKind::srf_local;
    if (name == "rf-large") return ModelKind::rf_large;
    throw std::invalid_argument("unknown model name: '" + name + "' (expected rf, srf-global, srf-local "
                                "or rf-large)");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct EvalSet {
    std::vector<std::size_t> rows;  // indices into the full dataset
};

/// Training draw for one cell: `size` rows with replacement from the full
/// dataset; the evaluation set is every row the draw never touched. The rare
/// draw that covers all rows is redrawn deterministically.
std::vector<std::size_t> draw_training(const Dataset& full, std::size_t size, std::uint64_t seed,
                                       EvalSet& eval) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        std::vector<std::size_t> train(size);
        std::vector<bool> drawn(full.n, false);
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t k = rng.uniform_index(full.n);
            train[i] = k;
            drawn[k] = true;
        }
        eval.rows.clear();
        for (std::size_t i = 0; i < full.n; ++i)
            if (!drawn[i]) eval.rows.push_back(i);
        if (!eval.rows.empty()) return train;
    }
}

struct CellScores {
    double mse = 0.0;
    double log_loss = 0.0;
    double predict_ms_per_query = 0.0;
};

CellScores score_raw_forest(std::span<const FittedTree> trees, const Dataset& full, const EvalSet& eval,
                            double noise, bool add_noise) {
    std::vector<double> preds(eval.rows.size()), targets(eval.rows.size());
    double loss = 0.0;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < eval.rows.size(); ++i) {
        const auto x = full.row(eval.rows[i]);
        const MeanVariance mv = rf_baseline_predict(trees, x);
        preds[i] = mv.mean;
        targets[i] = full.y[eval.rows[i]];
        const double var = std::max(mv.variance + (add_noise ? noise : 0.0), kVarianceFloor);
        loss += gaussian_log_loss(targets[i], mv.mean, var);
    }
    const double per_query = ms_since(t0) / static_cast<double>(eval.rows.size());
    return {mse(preds, targets), loss / static_cast<double>(eval.rows.size()), per_query};
}

CellScores score_smoothed_forest(const SmoothedForestModel& model, const Dataset& full,
                                 const EvalSet& eval) {
    std::vector<double> preds(eval.rows.size()), targets(eval.rows.size());
    double loss = 0.0;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < eval.rows.size(); ++i) {
        const auto x = full.row(eval.rows[i]);
        const PredictiveDistribution pd = forest_uncertainty(model, x);
        preds[i] = pd.mean;
        targets[i] = full.y[eval.rows[i]];
        loss += gaussian_log_loss(targets[i], pd.mean, std::max(pd.variance, kVarianceFloor));
    }
    const double per_query = ms_since(t0) / static_cast<double>(eval.rows.size());
    return {mse(preds, targets), loss / static_cast<double>(eval.rows.size()), per_query};
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(std::span<const NamedDataset> datasets,
                                             const BenchConfig& config) {
    if (datasets.empty()) throw std::invalid_argument("run_experiment: no datasets");
    if (config.reps == 0) throw std::invalid_argument("run_experiment: reps must be >= 1");
    if (config.training_sizes.empty()) throw std::invalid_argument("run_experiment: no training sizes");
    if (config.models.empty()) throw std::invalid_argument("run_experiment: no models");
    for (const NamedDataset& ds : datasets)
        for (std::size_t size : config.training_sizes)
            if (size < 2 || size > ds.data.n)
                throw std::invalid_argument("run_experiment: training size " + std::to_string(size) +
                                            " out of range for dataset '" + ds.name + "' (n = " +
                                            std::to_string(ds.data.n) + ")");

    const bool wants_base = std::any_of(config.models.begin(), config.models.end(), [](ModelKind m) {
        return m == ModelKind::rf_base || m == ModelKind::srf_global || m == ModelKind::srf_local;
    });

    std::vector<ExperimentRecord> records;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const NamedDataset& ds = datasets[di];
        for (std::size_t si = 0; si < config.training_sizes.size(); ++si) {
            const std::size_t size = config.training_sizes[si];
            for (std::size_t rep = 0; rep < config.reps; ++rep) {
                const std::uint64_t cell_seed = derive_seed(config.seed, di, si, rep);
                EvalSet eval;
                const std::vector<std::size_t> train_rows =
                    draw_training(ds.data, size, derive_seed(cell_seed, 0), eval);
                const Dataset train = subset(ds.data, train_rows);
                const std::uint64_t train_hash = hash_index_sequence(train_rows.data(), train_rows.size());
                const LambdaSearchSpec search =
                    config.lambda_search ? *config.lambda_search : default_lambda_search(train);

                // The base forest is shared: it is both the rf model and the
                // prediction function every smoothed variant calibrates.
                std::vector<FittedTree> base;
                double base_fit_ms = 0.0;
                if (wants_base) {
                    const auto t0 = Clock::now();
                    base = fit_forest(train, config.rf_trees, config.tree_params,
                                      derive_seed(cell_seed, 1));
                    base_fit_ms = ms_since(t0);
                }

                for (ModelKind kind : config.models) {
                    const auto t0 = Clock::now();
                    CellScores scores;
                    double extra_ms = 0.0;
                    switch (kind) {
                        case ModelKind::rf_base: {
                            const double noise =
                                config.baseline_noise
                                    ? rf_baseline_noise_variance(base, train, config.noise)
                                    : 0.0;
                            scores = score_raw_forest(base, ds.data, eval, noise, config.baseline_noise);
                            extra_ms = base_fit_ms;
                            break;
                        }
                        case ModelKind::rf_large: {
                            const std::vector<FittedTree> large = fit_forest(
                                train, config.rf_large_trees, config.tree_params, derive_seed(cell_seed, 2));
                            const double noise =
                                config.baseline_noise
                                    ? rf_baseline_noise_variance(large, train, config.noise)
                                    : 0.0;
                            scores = score_raw_forest(large, ds.data, eval, noise, config.baseline_noise);
                            break;
                        }
                        case ModelKind::srf_global:
                        case ModelKind::srf_local: {
                            const CalibrationResult cal = kind == ModelKind::srf_global
                                                              ? calibrate_global(base, train, search)
                                                              : calibrate_local(base, train, search);
                            ModelMetadata meta;
                            meta.feature_names = train.feature_names;
                            meta.target_name = train.target_name;
                            meta.tree_params = config.tree_params;
                            meta.seed = cell_seed;
                            const SmoothedForestModel model =
                                build_smoothed_model(base, cal, train, config.noise, std::move(meta));
                            scores = score_smoothed_forest(model, ds.data, eval);
                            break;
                        }
                    }
                    ExperimentRecord rec;
                    rec.dataset = ds.name;
                    rec.training_size = size;
                    rec.repetition = rep;
                    rec.model = kind;
                    rec.oob_mse = scores.mse;
                    rec.oob_log_loss = scores.log_loss;
                    rec.wall_time_ms = ms_since(t0) + extra_ms;
                    rec.predict_ms_per_query = scores.predict_ms_per_query;
                    rec.train_index_hash = train_hash;
                    records.push_back(std::move(rec));
                }
            }
        }
    }
    return records;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    if (v == 0.0) v = 0.0;  // canonical zero, no "-0"
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

char hex_digit(std::uint64_t v) { return "0123456789abcdef"[v & 0xf]; }

std::string hex64(std::uint64_t v) {
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = hex_digit(v);
    return s;
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
    out << "dataset,training_size,repetition,model,oob_mse,oob_log_loss,train_index_hash\n";
    for (const ExperimentRecord& r : records)
        out << r.dataset << ',' << r.training_size << ',' << r.repetition << ',' << to_string(r.model)
            << ',' << fmt(r.oob_mse) << ',' << fmt(r.oob_log_loss) << ',' << hex64(r.train_index_hash)
            << '\n';
}

void write_timings_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
    out << "dataset,training_size,repetition,model,wall_time_ms,predict_ms_per_query\n";
    for (const ExperimentRecord& r : records)
        out << r.dataset << ',' << r.training_size << ',' << r.repetition << ',' << to_string(r.model)
            << ',' << fmt_short(r.wall_time_ms) << ',' << fmt_short(r.predict_ms_per_query) << '\n';
}

namespace {

struct PairedImprovements {
    std::vector<double> pi_mse;
    std::vector<double> pi_log_loss;
};

/// Pairs every record with the baseline record of its cell and collects the
/// percentage improvements, grouped by `group_of(record)`.
template <class GroupOf>
std::map<std::pair<std::string, ModelKind>, PairedImprovements> collect_pairs(
    std::span<const ExperimentRecord> records, ModelKind baseline, GroupOf group_of) {
    std::map<std::tuple<std::string, std::size_t, std::size_t>, const ExperimentRecord*> base_by_cell;
    bool baseline_seen = false;
    for (const ExperimentRecord& r : records)
        if (r.model == baseline) {
            base_by_cell[{r.dataset, r.training_size, r.repetition}] = &r;
            baseline_seen = true;
        }
    if (!baseline_seen)
        throw std::invalid_argument("summarize: baseline model '" + to_string(baseline) +
                                    "' not present in the records");

    std::map<std::pair<std::string, ModelKind>, PairedImprovements> groups;
    for (const ExperimentRecord& r : records) {
        const auto it = base_by_cell.find({r.dataset, r.training_size, r.repetition});
        if (it == base_by_cell.end()) continue;
        PairedImprovements& g = groups[{group_of(r), r.model}];
        g.pi_mse.push_back(pi_risk(r.oob_mse, it->second->oob_mse));
        g.pi_log_loss.push_back(pi_risk(r.oob_log_loss, it->second->oob_log_loss));
    }
    return groups;
}

template <class GroupOf>
std::vector<SummaryRow> summarize_with(std::span<const ExperimentRecord> records, ModelKind baseline,
                                       GroupOf group_of) {
    std::vector<SummaryRow> rows;
    for (const auto& [key, g] : collect_pairs(records, baseline, group_of)) {
        SummaryRow row;
        row.group = key.first;
        row.model = key.second;
        row.n_pairs = g.pi_mse.size();
        row.mean_pi_mse = mean_of(g.pi_mse);
        row.se_pi_mse = standard_error(g.pi_mse);
        row.median_pi_log_loss = median_of(g.pi_log_loss);
        row.se_pi_log_loss = median_standard_error(g.pi_log_loss);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const ExperimentRecord> records, ModelKind baseline) {
    return summarize_with(records, baseline, [](const ExperimentRecord& r) { return r.dataset; });
}

std::vector<SummaryRow> summarize_by_size(std::span<const ExperimentRecord> records, ModelKind baseline) {
    std::vector<SummaryRow> rows = summarize_with(
        records, baseline, [](const ExperimentRecord& r) { return std::to_string(r.training_size); });
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        return std::stoull(a.group) < std::stoull(b.group);
    });
    return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows,
                       const std::string& group_column) {
    out << group_column << ",model,n_pairs,mean_pi_mse,se_pi_mse,median_pi_log_loss,se_pi_log_loss\n";
    for (const SummaryRow& r : rows)
        out << r.group << ',' << to_string(r.model) << ',' << r.n_pairs << ',' << fmt_short(r.mean_pi_mse)
            << ',' << fmt_short(r.se_pi_mse) << ',' << fmt_short(r.median_pi_log_loss) << ','
            << fmt_short(r.se_pi_log_loss) << '\n';
}

}  // namespace srf
