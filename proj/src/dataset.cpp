#include "srf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "srf/rng.hpp"

namespace srf {

void validate(const Dataset& d) {
    if (d.n == 0 || d.p == 0) throw std::invalid_argument("dataset: n and p must both be >= 1");
    if (d.x.size() != d.n * d.p) throw std::invalid_argument("dataset: feature buffer size mismatch");
    if (d.y.size() != d.n) throw std::invalid_argument("dataset: target length does not match row count");
    if (d.feature_names.size() != d.p)
        throw std::invalid_argument("dataset: feature_names length does not match feature count");
    for (double v : d.x)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
    for (double v : d.y)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite target value");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view cell =
            trim(std::string_view(line).substr(start, comma == std::string::npos ? comma : comma - start));
        cells.emplace_back(cell);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t data_row,
                  const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        std::ostringstream msg;
        msg << path << ": row " << data_row << ", column '" << column << "': not numeric: '" << cell << "'";
        throw std::runtime_error(msg.str());
    }
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << path << ": row " << data_row << ", column '" << column << "': non-finite value '" << cell << "'";
        throw std::runtime_error(msg.str());
    }
    return value;
}

Dataset load_csv_impl(const std::string& path, std::size_t target_index,
                      const std::vector<std::string>& header, std::ifstream& in) {
    Dataset d;
    d.p = header.size() - 1;
    d.target_name = header[target_index];
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != target_index) d.feature_names.push_back(header[j]);

    std::string line;
    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++data_row;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            std::ostringstream msg;
            msg << path << ": row " << data_row << ": expected " << header.size() << " cells, found "
                << cells.size();
            throw std::runtime_error(msg.str());
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const double v = parse_cell(cells[j], path, data_row, header[j]);
            if (j == target_index)
                d.y.push_back(v);
            else
                d.x.push_back(v);
        }
    }
    d.n = data_row;
    if (d.n == 0) throw std::runtime_error(path + ": empty dataset (no data rows)");
    validate(d);
    return d;
}

std::vector<std::string> read_header(const std::string& path, std::ifstream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::vector<std::string> header = split_line(line);
    if (header.size() < 2) throw std::runtime_error(path + ": need at least one feature and one target column");
    return header;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    const std::vector<std::string> header = read_header(path, in);
    const auto it = std::find(header.begin(), header.end(), target_column);
    if (it == header.end())
        throw std::runtime_error(path + ": target column '" + target_column + "' not found in header");
    return load_csv_impl(path, static_cast<std::size_t>(it - header.begin()), header, in);
}

Dataset load_csv(const std::string& path, std::size_t target_index) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    const std::vector<std::string> header = read_header(path, in);
    if (target_index >= header.size())
        throw std::runtime_error(path + ": target column index " + std::to_string(target_index) +
                                 " out of range (file has " + std::to_string(header.size()) + " columns)");
    return load_csv_impl(path, target_index, header, in);
}

void save_csv(const Dataset& d, const std::string& path) {
    validate(d);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (std::size_t j = 0; j < d.p; ++j) out << d.feature_names[j] << ',';
    out << d.target_name << '\n';
    char buf[64];
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t j = 0; j < d.p; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", d.at(i, j));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", d.y[i]);
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset subset(const Dataset& d, std::span<const std::size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("subset: empty row set");
    Dataset out;
    out.n = rows.size();
    out.p = d.p;
    out.feature_names = d.feature_names;
    out.target_name = d.target_name;
    out.x.reserve(out.n * out.p);
    out.y.reserve(out.n);
    for (std::size_t i : rows) {
        if (i >= d.n) throw std::invalid_argument("subset: row index out of range");
        const auto r = d.row(i);
        out.x.insert(out.x.end(), r.begin(), r.end());
        out.y.push_back(d.y[i]);
    }
    return out;
}

BootstrapSplit bootstrap(const Dataset& d, std::uint64_t seed) {
    if (d.n == 0) throw std::invalid_argument("bootstrap: empty dataset");
    Rng rng(seed);
    BootstrapSplit split;
    split.in_bag.resize(d.n);
    std::vector<bool> seen(d.n, false);
    for (std::size_t i = 0; i < d.n; ++i) {
        const std::size_t k = rng.uniform_index(d.n);
        split.in_bag[i] = k;
        seen[k] = true;
    }
    for (std::size_t i = 0; i < d.n; ++i)
        if (!seen[i]) split.oob.push_back(i);
    return split;
}

Dataset make_step_data(std::size_t n, double b, double w, double noise_sd, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("make_step_data: n must be >= 2");
    if (!(w > 0.0)) throw std::invalid_argument("make_step_data: w must be > 0");
    if (noise_sd < 0.0) throw std::invalid_argument("make_step_data: noise_sd must be >= 0");
    Rng rng(seed);
    Dataset d;
    d.n = n;
    d.p = 1;
    d.feature_names = {"x"};
    d.x.resize(n);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(b - w, b + w);
        d.x[i] = x;
        d.y[i] = (x > b ? 1.0 : 0.0) + (noise_sd > 0.0 ? noise_sd * rng.gaussian() : 0.0);
    }
    return d;
}

double hetero_truth(double x) { return x < 0.0 ? 0.0 : std::sin(5.0 * std::numbers::pi * x); }

Dataset make_hetero_data(std::size_t n, std::uint64_t seed, double noise_sd) {
    if (n < 10) throw std::invalid_argument("make_hetero_data: n must be >= 10");
    if (noise_sd < 0.0) throw std::invalid_argument("make_hetero_data: noise_sd must be >= 0");
    Rng rng(seed);
    Dataset d;
    d.n = n;
    d.p = 1;
    d.feature_names = {"x"};
    d.x.resize(n);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        d.x[i] = x;
        d.y[i] = hetero_truth(x) + (noise_sd > 0.0 ? noise_sd * rng.gaussian() : 0.0);
    }
    return d;
}

}  // namespace srf
