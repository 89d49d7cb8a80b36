#include "cosvar/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cosvar/optimize.hpp"
#include "cosvar/special.hpp"

namespace cosvar {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

bool parse_number(std::string_view token, double& out) {
    if (token.empty()) return false;
    if (token.front() == '+') token.remove_prefix(1);
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

DataMatrix parse_csv(std::istream& in) {
    DataMatrix result;
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    bool first_content = true;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view content = trim(line);
        if (content.empty() || content.front() == '#') continue;
        const auto cells = split(content);

        if (first_content) {
            first_content = false;
            width = cells.size();
            double scratch;
            bool header = false;
            for (auto c : cells) header = header || !parse_number(c, scratch);
            if (header) {
                for (auto c : cells) result.column_names.emplace_back(c);
                continue;
            }
        }
        if (cells.size() != width) {
            throw ParseError("ragged row at line " + std::to_string(line_no), line_no);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v;
            if (!parse_number(cells[c], v)) {
                throw ParseError("non-numeric cell at line " + std::to_string(line_no) + ", column " + std::to_string(c + 1),
                                 line_no, c + 1);
            }
            if (!std::isfinite(v)) {
                throw ParseError("non-finite cell at line " + std::to_string(line_no) + ", column " + std::to_string(c + 1),
                                 line_no, c + 1);
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (first_content) throw ParseError("empty file", line_no);
    if (rows == 0) throw ParseError("no data rows after the header", line_no);
    result.values = Matrix(rows, width, std::move(values));
    return result;
}

DataMatrix parse_csv_text(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

DataMatrix load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_csv(in);
}

std::vector<double> load_vector_csv(const std::filesystem::path& path) {
    const DataMatrix m = load_csv(path);
    if (m.rows() != 1 && m.cols() != 1) {
        throw std::runtime_error(path.string() + ": expected a single row or a single column of numbers");
    }
    return {m.values.data().begin(), m.values.data().end()};
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
        if (c) out << ',';
        out << (c < header.size() ? header[c] : "c" + std::to_string(c));
    }
    out << '\n';
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            if (c) out << ',';
            out << format_double(values(r, c));
        }
        out << '\n';
    }
}

void write_csv(std::ostream& out, const DataMatrix& data) {
    write_csv(out, data.values, data.column_names);
}

std::size_t EstimatedModel::retained() const noexcept {
    std::size_t k = 0;
    for (bool f : floored) k += f ? 0 : 1;
    return k;
}

GaussianModel EstimatedModel::retained_model() const {
    std::vector<double> means, vars;
    const std::vector<double> rotated = [&] {
        std::vector<double> r(eigenvalues.size(), 0.0);
        for (std::size_t k = 0; k < eigenvalues.size(); ++k)
            for (std::size_t i = 0; i < mean.size(); ++i) r[k] += basis(i, k) * mean[i];
        return r;
    }();
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (floored[k]) continue;
        means.push_back(rotated[k]);
        vars.push_back(eigenvalues[k]);
    }
    if (vars.empty()) throw std::domain_error("EstimatedModel: every axis is below the eigenvalue floor");
    return GaussianModel(std::move(means), Spectrum(std::move(vars)));
}

DimensionlessMeans EstimatedModel::retained_etas() const {
    std::vector<double> out;
    for (std::size_t k = 0; k < etas.size(); ++k)
        if (!floored[k]) out.push_back(etas[k]);
    return DimensionlessMeans(std::move(out));
}

Matrix sample_covariance(const Matrix& data) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    if (n < 2) throw std::invalid_argument("sample_covariance: at least two rows are required");
    std::vector<double> mean(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        CompensatedSum s;
        for (std::size_t r = 0; r < n; ++r) s += data(r, c);
        mean[c] = s.value() / static_cast<double>(n);
    }
    Matrix cov(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            CompensatedSum s;
            for (std::size_t r = 0; r < n; ++r) s += (data(r, i) - mean[i]) * (data(r, j) - mean[j]);
            cov(i, j) = cov(j, i) = s.value() / static_cast<double>(n - 1);
        }
    }
    return cov;
}

EstimatedModel estimate_model(const DataMatrix& data) {
    if (data.rows() < 2 || data.cols() < 1) {
        throw std::invalid_argument("estimate_model: need at least two rows and one column");
    }
    const Matrix cov = sample_covariance(data.values);
    for (double x : cov.data()) {
        if (!std::isfinite(x)) throw std::domain_error("estimate_model: covariance is not finite");
    }
    const SymmetricEigen eig = jacobi_eigen(cov);

    EstimatedModel model;
    const std::size_t d = data.cols();
    model.mean.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        CompensatedSum s;
        for (std::size_t r = 0; r < data.rows(); ++r) s += data.values(r, c);
        model.mean[c] = s.value() / static_cast<double>(data.rows());
    }
    model.eigenvalues = eig.values;
    model.basis = eig.vectors;

    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += cov(i, i);
    model.floor = EstimatedModel::kFloorFraction * trace;

    model.etas.assign(d, 0.0);
    model.floored.assign(d, false);
    for (std::size_t k = 0; k < d; ++k) {
        if (!(model.eigenvalues[k] > model.floor)) {
            model.floored[k] = true;
            continue;
        }
        double projected = 0.0;
        for (std::size_t i = 0; i < d; ++i) projected += model.basis(i, k) * model.mean[i];
        model.etas[k] = projected / std::sqrt(model.eigenvalues[k]);
    }
    return model;
}

DataMatrix center_rows(const DataMatrix& data) {
    if (data.cols() < 2) throw std::invalid_argument("center_rows: at least two columns are required");
    DataMatrix out = data;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.values.row(r);
        const double mean = compensated_sum(row) / static_cast<double>(row.size());
        for (double& x : row) x -= mean;
    }
    return out;
}

Matrix optimal_transform(const EstimatedModel& model) {
    const std::size_t d = model.eigenvalues.size();
    std::vector<double> diag(d);
    for (std::size_t k = 0; k < d; ++k) {
        if (model.floored[k]) {
            throw std::domain_error("optimal_transform: eigen-axis " + std::to_string(k) +
                                    " is below the eigenvalue floor; reduce the dimension before transforming");
        }
        diag[k] = std::sqrt(optimal_weight(model.etas[k]) / model.eigenvalues[k]);
    }
    return reconstruct(model.basis, diag);
}

Matrix apply_transform(const Matrix& data, const Matrix& w) {
    return data * w;
}

}  // namespace cosvar
