#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "srf/calibrate.hpp"
#include "srf/dataset.hpp"
#include "srf/ensemble.hpp"
#include "srf/tree.hpp"

namespace srf {

enum class ModelKind { rf_base, srf_global, srf_local, rf_large };

std::string to_string(ModelKind kind);           // "rf", "srf-global", "srf-local", "rf-large"
ModelKind model_kind_from_string(const std::string& name);

struct NamedDataset {
    std::string name;
    Dataset data;
};

struct BenchConfig {
    std::vector<std::size_t> training_sizes;
    std::size_t reps = 1;
    std::vector<ModelKind> models = {ModelKind::rf_base, ModelKind::srf_global, ModelKind::srf_local,
                                     ModelKind::rf_large};
    std::uint64_t seed = 0;
    std::size_t rf_trees = 100;
    std::size_t rf_large_trees = 1000;
    TreeParams tree_params;  // seed field ignored; per-cell streams are derived
    std::optional<LambdaSearchSpec> lambda_search;  // default: data-driven per training set
    NoiseMode noise = NoiseMode::in_sample;
    bool baseline_noise = true;  // add the noise term to the raw-forest variance for log-loss
};

/// One (dataset, training size, repetition, model) result row.
struct ExperimentRecord {
    std::string dataset;
    std::size_t training_size = 0;
    std::size_t repetition = 0;
    ModelKind model = ModelKind::rf_base;
    double oob_mse = 0.0;
    double oob_log_loss = 0.0;
    double wall_time_ms = 0.0;
    double predict_ms_per_query = 0.0;
    std::uint64_t train_index_hash = 0;  // all models in a cell share it
};

/// Runs the full protocol: per (dataset, size, repetition) cell, draws a
/// bootstrap training set of the requested size, fits every configured model
/// on those identical rows, and evaluates mean squared error and Gaussian
/// log-loss on the rows the bootstrap never touched. Fully deterministic
/// given the seed: cell streams come from derive_seed(seed, dataset_index,
/// size_index, repetition). Throws on training sizes exceeding a dataset.
std::vector<ExperimentRecord> run_experiment(std::span<const NamedDataset> datasets,
                                             const BenchConfig& config);

/// Records CSV without the wall-time column, so replaying a seed gives a
/// byte-identical file; timings go to their own CSV with the same keys.
void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records);
void write_timings_csv(std::ostream& out, std::span<const ExperimentRecord> records);

/// Percentage-improvement summary against a baseline model, paired within
/// each (dataset, size, repetition) cell: mean PI of MSE with its standard
/// error, and median PI of log-loss with its standard error.
struct SummaryRow {
    std::string group;  // dataset name, or training size for the by-size table
    ModelKind model = ModelKind::rf_base;
    std::size_t n_pairs = 0;
    double mean_pi_mse = 0.0;
    double se_pi_mse = 0.0;
    double median_pi_log_loss = 0.0;
    double se_pi_log_loss = 0.0;
};

/// Per (dataset, model). Throws std::invalid_argument when the baseline is
/// absent from the records.
std::vector<SummaryRow> summarize(std::span<const ExperimentRecord> records, ModelKind baseline);

/// Per (training size, model), aggregated across datasets and repetitions.
std::vector<SummaryRow> summarize_by_size(std::span<const ExperimentRecord> records, ModelKind baseline);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, const std::string& group_column);

}  // namespace srf
