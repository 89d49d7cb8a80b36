#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosvar/linalg.hpp"
#include "cosvar/moments.hpp"

namespace cosvar {

/// Samples as rows, features as columns. Never transposed automatically.
struct DataMatrix {
    Matrix values;
    std::vector<std::string> column_names;  // empty when the input had no header

    std::size_t rows() const noexcept { return values.rows(); }
    std::size_t cols() const noexcept { return values.cols(); }
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : std::runtime_error(what), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

DataMatrix parse_csv(std::istream& in);
DataMatrix parse_csv_text(const std::string& text);
DataMatrix load_csv(const std::filesystem::path& path);

/// Every numeric cell of a CSV in reading order; accepts one row or one column.
std::vector<double> load_vector_csv(const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header);
void write_csv(std::ostream& out, const DataMatrix& data);

/// Sample eigen-model of a data matrix.
struct EstimatedModel {
    static constexpr double kFloorFraction = 1e-10;  // of the covariance trace

    std::vector<double> mean;         // column means
    std::vector<double> eigenvalues;  // nonincreasing; may contain floored entries
    Matrix basis;                     // columns are eigenvectors
    std::vector<double> etas;         // (U^T mean)_i / sqrt(lambda_i); 0 on floored axes
    std::vector<bool> floored;
    double floor = 0.0;

    std::size_t retained() const noexcept;
    /// Eigenbasis model over the non-floored axes.
    GaussianModel retained_model() const;
    DimensionlessMeans retained_etas() const;
};

Matrix sample_covariance(const Matrix& data);
EstimatedModel estimate_model(const DataMatrix& data);

/// Subtract each row's own mean. Cosine of centered rows is the Pearson
/// correlation of the original rows.
DataMatrix center_rows(const DataMatrix& data);

/// W = U diag(sqrt(w_i / lambda_i)) U^T with w_i the optimal weights for the
/// model's etas. Throws std::domain_error when an axis is floored.
Matrix optimal_transform(const EstimatedModel& model);

/// Rows of `data` multiplied on the right by `w`.
Matrix apply_transform(const Matrix& data, const Matrix& w);

}  // namespace cosvar
