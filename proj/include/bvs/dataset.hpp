#pragma once

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bvs/model_index.hpp"

namespace bvs {

/// Response plus column-centered design. Immutable once built; share freely between threads.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;       ///< centered covariates, n x p
    Eigen::VectorXd x_mean;  ///< column means removed from the raw covariates
    std::vector<std::string> names;
    std::string response_name;
    std::vector<bool> fixed_mask;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
    int p_fixed() const;
    int p_free() const { return p() - p_fixed(); }
    double y_mean() const { return y.mean(); }
    double sst() const { return (y.array() - y.mean()).square().sum(); }

    /// Column ids that are not pinned by the fixed mask, in column order.
    std::vector<int> free_columns() const;
    /// Model holding exactly the fixed covariates.
    ModelIndex base_model() const;
    bool admissible(const ModelIndex& m) const;
};

/// Centers the covariates and validates n > p and full column rank.
/// Throws Error(data) on violations, Error(config) on inconsistent labels.
Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> names,
                     std::vector<bool> fixed_mask = {}, std::string response_name = "y");

/// Reads delimiter-separated text (comma, semicolon or tab, detected from the header).
Dataset load_dataset(std::istream& in, const std::string& response_column,
                     const std::vector<std::string>& fixed_columns = {});
Dataset load_dataset_file(const std::string& path, const std::string& response_column,
                          const std::vector<std::string>& fixed_columns = {});

/// Subtracts column means in two passes so the residual mean is at rounding level.
template <typename Derived>
Eigen::VectorXd center_columns(Eigen::MatrixBase<Derived>& X) {
    Eigen::VectorXd mean = X.colwise().mean().transpose();
    X.rowwise() -= mean.transpose();
    const Eigen::VectorXd residual = X.colwise().mean().transpose();
    X.rowwise() -= residual.transpose();
    return mean + residual;
}

/// Split a delimited line; fields are trimmed and surrounding double quotes removed.
std::vector<std::string> split_fields(const std::string& line, char delim);
char detect_delimiter(const std::string& header);

}  // namespace bvs
