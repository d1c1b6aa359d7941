// Command-line front end: train / predict / bench / theorem1.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srf/bench.hpp"
#include "srf/calibrate.hpp"
#include "srf/dataset.hpp"
#include "srf/ensemble.hpp"
#include "srf/metrics.hpp"
#include "srf/rng.hpp"
#include "srf/stump.hpp"

namespace {

struct TreeOptions {
    int max_depth = -1;
    std::size_t min_samples_leaf = 5;
    std::size_t mtry = 0;

    srf::TreeParams params() const { return {max_depth, min_samples_leaf, mtry, 0}; }
};

struct LambdaOptions {
    double lambda_min = 0.0;  // 0: data-driven default
    double lambda_max = 0.0;
    std::size_t grid = 25;

    std::optional<srf::LambdaSearchSpec> spec() const {
        if (lambda_min <= 0.0 && lambda_max <= 0.0) return std::nullopt;
        if (lambda_min <= 0.0 || lambda_max <= 0.0)
            throw CLI::ValidationError("--lambda-min and --lambda-max must be given together");
        return srf::LambdaSearchSpec{lambda_min, lambda_max, grid, 1e-3};
    }
};

void add_tree_flags(CLI::App& cmd, TreeOptions& opts) {
    cmd.add_option("--max-depth", opts.max_depth, "Maximum tree depth (-1: unlimited)");
    cmd.add_option("--min-samples-leaf", opts.min_samples_leaf, "Minimum in-bag rows per leaf");
    cmd.add_option("--mtry", opts.mtry, "Features tried per split (0: max(1, p/3))");
}

void add_lambda_flags(CLI::App& cmd, LambdaOptions& opts) {
    cmd.add_option("--lambda-min", opts.lambda_min, "Lower end of the bandwidth search range");
    cmd.add_option("--lambda-max", opts.lambda_max, "Upper end of the bandwidth search range");
    cmd.add_option("--lambda-grid", opts.grid, "Number of log-spaced grid points")->check(CLI::Range(3, 1000));
}

std::string format_g(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

int run_train(const std::string& data_path, const std::string& target, std::size_t trees,
              const TreeOptions& tree_opts, const LambdaOptions& lambda_opts, const std::string& mode,
              std::uint64_t seed, bool oob_noise, const std::string& out_path) {
    const srf::Dataset data = srf::load_csv(data_path, target);
    std::cerr << "loaded " << data.n << " rows x " << data.p << " features from " << data_path << "\n";

    const std::vector<srf::FittedTree> forest = srf::fit_forest(data, trees, tree_opts.params(), seed);
    const srf::LambdaSearchSpec search =
        lambda_opts.spec() ? *lambda_opts.spec() : srf::default_lambda_search(data);
    const srf::CalibrationMode cal_mode = srf::calibration_mode_from_string(mode);
    const srf::CalibrationResult cal = cal_mode == srf::CalibrationMode::global
                                           ? srf::calibrate_global(forest, data, search)
                                           : srf::calibrate_local(forest, data, search);

    srf::ModelMetadata meta;
    meta.feature_names = data.feature_names;
    meta.target_name = data.target_name;
    meta.tree_params = tree_opts.params();
    meta.seed = seed;
    const srf::NoiseMode noise = oob_noise ? srf::NoiseMode::out_of_bag : srf::NoiseMode::in_sample;
    const srf::SmoothedForestModel model = srf::build_smoothed_model(forest, cal, data, noise, meta);
    srf::save_model(model, out_path);

    std::cerr << "calibration=" << mode << " oob_rss=" << format_g(cal.oob_rss)
              << " noise_variance=" << format_g(model.noise_variance) << "\n";
    std::cerr << "model written to " << out_path << "\n";
    return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path) {
    const srf::SmoothedForestModel model = srf::load_model(model_path);

    // Query CSV: must contain every training feature column (by name); a
    // column named like the training target is ignored if present.
    std::ifstream in(data_path);
    if (!in) throw std::runtime_error("cannot open file: " + data_path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw std::runtime_error(data_path + ": empty file");
    std::vector<std::string> header;
    {
        std::stringstream ss(header_line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            header.push_back(cell);
        }
    }
    std::vector<std::size_t> col_of;
    for (const std::string& name : model.meta.feature_names) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error(data_path + ": missing feature column '" + name + "'");
        col_of.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (out_path != "-") {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open file for writing: " + out_path);
        out = &file;
    }
    *out << "mean,variance,intra,inter,noise\n";

    std::string line;
    std::size_t row = 0;
    std::vector<double> x(model.meta.feature_names.size());
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != header.size())
            throw std::runtime_error(data_path + ": row " + std::to_string(row) + ": cell count mismatch");
        for (std::size_t j = 0; j < col_of.size(); ++j) {
            std::string cell_j = cells[col_of[j]];
            while (!cell_j.empty() && (cell_j.back() == '\r' || cell_j.back() == ' ')) cell_j.pop_back();
            std::size_t consumed = 0;
            try {
                x[j] = std::stod(cell_j, &consumed);
            } catch (const std::exception&) {
                consumed = std::string::npos;
            }
            if (consumed != cell_j.size() || !std::isfinite(x[j]))
                throw std::runtime_error(data_path + ": row " + std::to_string(row) + ", column '" +
                                         model.meta.feature_names[j] + "': not numeric: '" + cell_j + "'");
        }
        const srf::PredictiveDistribution pd = srf::forest_uncertainty(model, x);
        *out << format_g(pd.mean, "%.17g") << ',' << format_g(pd.variance, "%.17g") << ','
             << format_g(pd.intra, "%.17g") << ',' << format_g(pd.inter, "%.17g") << ','
             << format_g(pd.noise, "%.17g") << '\n';
    }
    if (row == 0) throw std::runtime_error(data_path + ": no query rows");
    std::cerr << row << " predictions written\n";
    return 0;
}

struct SyntheticRequest {
    std::string kind;  // "step" or "hetero"
    std::size_t n = 400;
    double noise = 0.1;
    std::uint64_t seed = 1;
};

srf::NamedDataset make_synthetic(const SyntheticRequest& req) {
    if (req.kind == "step")
        return {"step", srf::make_step_data(req.n, 0.0, 1.0, req.noise, req.seed)};
    if (req.kind == "hetero") return {"hetero", srf::make_hetero_data(req.n, req.seed, req.noise)};
    throw CLI::ValidationError("unknown synthetic dataset '" + req.kind + "' (expected step or hetero)");
}

int run_bench(const std::vector<std::string>& data_paths, const std::string& target,
              const std::vector<std::string>& synthetic, std::size_t synthetic_n, double synthetic_noise,
              const std::vector<std::size_t>& sizes, const std::vector<double>& size_fracs, std::size_t reps,
              const std::vector<std::string>& model_names, std::uint64_t seed, std::size_t trees,
              std::size_t trees_large, const TreeOptions& tree_opts, const LambdaOptions& lambda_opts,
              bool oob_noise, bool no_baseline_noise, const std::string& out_dir) {
    std::vector<srf::NamedDataset> datasets;
    for (const std::string& path : data_paths) {
        if (target.empty()) throw CLI::ValidationError("--target is required with --data");
        datasets.push_back({std::filesystem::path(path).stem().string(), srf::load_csv(path, target)});
    }
    for (const std::string& kind : synthetic)
        datasets.push_back(make_synthetic({kind, synthetic_n, synthetic_noise, srf::derive_seed(seed, 0xda7a)}));
    if (datasets.empty()) throw CLI::ValidationError("no datasets: pass --data and/or --synthetic");

    srf::BenchConfig config;
    config.training_sizes = sizes;
    for (double f : size_fracs) {
        if (!(f > 0.0) || f > 1.0) throw CLI::ValidationError("--size-fracs entries must be in (0, 1]");
        for (const srf::NamedDataset& ds : datasets)
            config.training_sizes.push_back(
                std::max<std::size_t>(2, static_cast<std::size_t>(f * static_cast<double>(ds.data.n))));
    }
    std::sort(config.training_sizes.begin(), config.training_sizes.end());
    config.training_sizes.erase(
        std::unique(config.training_sizes.begin(), config.training_sizes.end()),
        config.training_sizes.end());
    if (config.training_sizes.empty()) throw CLI::ValidationError("no training sizes: pass --sizes");

    config.reps = reps;
    config.seed = seed;
    config.rf_trees = trees;
    config.rf_large_trees = trees_large;
    config.tree_params = tree_opts.params();
    config.lambda_search = lambda_opts.spec();
    config.noise = oob_noise ? srf::NoiseMode::out_of_bag : srf::NoiseMode::in_sample;
    config.baseline_noise = !no_baseline_noise;
    if (!model_names.empty()) {
        config.models.clear();
        for (const std::string& name : model_names) config.models.push_back(srf::model_kind_from_string(name));
    }

    const std::vector<srf::ExperimentRecord> records = srf::run_experiment(datasets, config);

    std::filesystem::create_directories(out_dir);
    const auto write = [&](const std::string& name, auto writer) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open file for writing: " + path);
        writer(out);
        std::cerr << "wrote " << path << "\n";
    };
    write("records.csv", [&](std::ostream& o) { srf::write_records_csv(o, records); });
    write("timings.csv", [&](std::ostream& o) { srf::write_timings_csv(o, records); });

    const bool have_baseline = std::any_of(config.models.begin(), config.models.end(),
                                           [](srf::ModelKind m) { return m == srf::ModelKind::rf_base; });
    if (have_baseline) {
        const auto by_dataset = srf::summarize(records, srf::ModelKind::rf_base);
        const auto by_size = srf::summarize_by_size(records, srf::ModelKind::rf_base);
        write("summary_by_dataset.csv",
              [&](std::ostream& o) { srf::write_summary_csv(o, by_dataset, "dataset"); });
        write("summary_by_size.csv",
              [&](std::ostream& o) { srf::write_summary_csv(o, by_size, "training_size"); });
        for (const srf::SummaryRow& row : by_dataset)
            if (row.model != srf::ModelKind::rf_base)
                std::cerr << row.group << " " << to_string(row.model) << ": PI_MSE "
                          << format_g(row.mean_pi_mse, "%.4g") << " (" << format_g(row.se_pi_mse, "%.4g")
                          << "), PI_log-loss " << format_g(row.median_pi_log_loss, "%.4g") << " ("
                          << format_g(row.se_pi_log_loss, "%.4g") << ")\n";
    } else {
        std::cerr << "baseline model 'rf' not in --models; summaries skipped\n";
    }
    return 0;
}

int run_theorem1(std::size_t n, double w, double b, std::size_t reps, std::uint64_t seed, std::size_t bins,
                 const std::string& out_dir) {
    const srf::SplitSimulationReport report = srf::simulate_split_asymptotics(n, w, b, reps, seed);

    std::ostringstream summary;
    summary << "statistic,value\n";
    summary << "n," << n << "\n";
    summary << "w," << format_g(w) << "\n";
    summary << "b," << format_g(b) << "\n";
    summary << "reps," << reps << "\n";
    summary << "mean," << format_g(report.mean) << "\n";
    summary << "variance," << format_g(report.variance) << "\n";
    summary << "ks_distance_laplace01," << format_g(report.ks_distance) << "\n";
    summary << "degenerate_redraws," << report.degenerate_redraws << "\n";

    // Histogram of the scaled errors, plot-ready.
    const auto [lo_it, hi_it] =
        std::minmax_element(report.scaled_errors.begin(), report.scaled_errors.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double e : report.scaled_errors) {
        std::size_t k = width > 0.0 ? static_cast<std::size_t>((e - lo) / width) : 0;
        if (k >= bins) k = bins - 1;
        ++counts[k];
    }
    std::ostringstream hist;
    hist << "bin_lower,bin_upper,count,density\n";
    for (std::size_t k = 0; k < bins; ++k) {
        const double a = lo + static_cast<double>(k) * width;
        const double density =
            width > 0.0
                ? static_cast<double>(counts[k]) / (static_cast<double>(reps) * width)
                : 0.0;
        hist << format_g(a) << ',' << format_g(a + width) << ',' << counts[k] << ',' << format_g(density)
             << '\n';
    }

    if (out_dir.empty()) {
        std::cout << summary.str() << "\n" << hist.str();
    } else {
        std::filesystem::create_directories(out_dir);
        const auto dump = [&](const std::string& name, const std::string& text) {
            const std::string path = (std::filesystem::path(out_dir) / name).string();
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot open file for writing: " + path);
            out << text;
            std::cerr << "wrote " << path << "\n";
        };
        dump("theorem1_summary.csv", summary.str());
        dump("theorem1_histogram.csv", hist.str());
        std::cout << "mean=" << format_g(report.mean) << " variance=" << format_g(report.variance)
                  << " ks=" << format_g(report.ks_distance) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smoothed random forest regression: training, prediction and benchmarks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a config file; command-line flags take precedence");

    // train
    auto* train = app.add_subcommand("train", "Fit and calibrate a smoothed forest, write a model file");
    std::string train_data, train_target, train_mode = "local", train_out = "model.json";
    std::size_t train_trees = 100;
    std::uint64_t train_seed = 0;
    bool train_oob_noise = false;
    TreeOptions train_tree;
    LambdaOptions train_lambda;
    train->add_option("--data", train_data, "Training CSV (header row, numeric cells)")->required();
    train->add_option("--target", train_target, "Name of the target column")->required();
    train->add_option("--trees", train_trees, "Number of trees");
    train->add_option("--seed", train_seed, "Master seed");
    train->add_option("--calibration", train_mode, "Calibration mode: global or local")
        ->check(CLI::IsMember({"global", "local"}));
    train->add_flag("--oob-noise", train_oob_noise,
                    "Estimate the noise term from out-of-bag residuals instead of in-sample ones");
    train->add_option("--out", train_out, "Output model file");
    add_tree_flags(*train, train_tree);
    add_lambda_flags(*train, train_lambda);

    // predict
    auto* predict = app.add_subcommand("predict", "Predict mean and variance decomposition for query points");
    std::string predict_model, predict_data, predict_out = "-";
    predict->add_option("--model", predict_model, "Model file written by train")->required();
    predict->add_option("--data", predict_data, "CSV of query points (feature columns by name)")->required();
    predict->add_option("--out", predict_out, "Output CSV path, or - for stdout");

    // bench
    auto* bench = app.add_subcommand("bench", "Paired benchmark of rf / srf-global / srf-local / rf-large");
    std::vector<std::string> bench_data, bench_synth, bench_models;
    std::string bench_target, bench_out = "bench_out";
    std::vector<std::size_t> bench_sizes;
    std::vector<double> bench_fracs;
    std::size_t bench_reps = 20, bench_trees = 100, bench_trees_large = 1000, bench_synth_n = 400;
    double bench_synth_noise = 0.1;
    std::uint64_t bench_seed = 0;
    bool bench_oob_noise = false, bench_no_baseline_noise = false;
    TreeOptions bench_tree;
    LambdaOptions bench_lambda;
    bench->add_option("--data", bench_data, "Dataset CSV paths (repeatable)")->delimiter(',');
    bench->add_option("--target", bench_target, "Target column name for --data files");
    bench->add_option("--synthetic", bench_synth, "Built-in datasets: step, hetero (repeatable)")
        ->delimiter(',');
    bench->add_option("--synthetic-n", bench_synth_n, "Rows per synthetic dataset");
    bench->add_option("--synthetic-noise", bench_synth_noise, "Noise standard deviation for synthetic data");
    bench->add_option("--sizes", bench_sizes, "Training sizes (rows drawn with replacement per cell)")
        ->delimiter(',');
    bench->add_option("--size-fracs", bench_fracs,
                      "Training sizes as fractions of each dataset (the resampled share of the data)")
        ->delimiter(',');
    bench->add_option("--reps", bench_reps, "Repetitions per (dataset, size) cell");
    bench->add_option("--models", bench_models, "Subset of: rf srf-global srf-local rf-large")
        ->delimiter(',');
    bench->add_option("--seed", bench_seed, "Master seed");
    bench->add_option("--trees", bench_trees, "Trees in the base forest");
    bench->add_option("--trees-large", bench_trees_large, "Trees in the large forest");
    bench->add_flag("--oob-noise", bench_oob_noise, "Noise terms from out-of-bag residuals");
    bench->add_flag("--no-baseline-noise", bench_no_baseline_noise,
                    "Do not add a noise term to the raw-forest variance for log-loss");
    bench->add_option("--out", bench_out, "Output directory");
    add_tree_flags(*bench, bench_tree);
    add_lambda_flags(*bench, bench_lambda);

    // theorem1
    auto* theorem = app.add_subcommand(
        "theorem1", "Simulate the large-sample Laplace law of the stump split-point estimator");
    std::size_t th_n = 5000, th_reps = 2000, th_bins = 40;
    double th_w = 1.0, th_b = 0.0;
    std::uint64_t th_seed = 0;
    std::string th_out;
    theorem->add_option("--n", th_n, "Design points per repetition");
    theorem->add_option("--w", th_w, "Half-width of the design distribution");
    theorem->add_option("--b", th_b, "True breakpoint");
    theorem->add_option("--reps", th_reps, "Number of repetitions");
    theorem->add_option("--seed", th_seed, "Master seed");
    theorem->add_option("--bins", th_bins, "Histogram bins")->check(CLI::Range(1, 10000));
    theorem->add_option("--out", th_out, "Output directory (default: print to stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return run_train(train_data, train_target, train_trees, train_tree, train_lambda, train_mode,
                             train_seed, train_oob_noise, train_out);
        if (predict->parsed()) return run_predict(predict_model, predict_data, predict_out);
        if (bench->parsed())
            return run_bench(bench_data, bench_target, bench_synth, bench_synth_n, bench_synth_noise,
                             bench_sizes, bench_fracs, bench_reps, bench_models, bench_seed, bench_trees,
                             bench_trees_large, bench_tree, bench_lambda, bench_oob_noise,
                             bench_no_baseline_noise, bench_out);
        if (theorem->parsed()) return run_theorem1(th_n, th_w, th_b, th_reps, th_seed, th_bins, th_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
