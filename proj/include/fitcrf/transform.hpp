#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include <json.hpp>

namespace fitcrf::transform {

/// Standard scaler + PCA, fit on training rows only and then applied
/// unchanged to every downstream split and task.
struct FittedTransform {
    std::string layout_version;
    Eigen::VectorXd mean;                 // per-feature
    Eigen::VectorXd scale;                // per-feature population std; 1 for constant features
    Eigen::MatrixXd components;           // k x d, rows orthonormal
    Eigen::VectorXd explained_variance;   // k eigenvalues of the standardized covariance
    std::vector<double> explained_variance_ratio;
    std::vector<std::string> warnings;    // constant-feature notes

    std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
    std::size_t output_dim() const { return static_cast<std::size_t>(components.rows()); }
};

/// Standardize, then keep the smallest PCA basis whose cumulative explained
/// variance reaches `target_evr` (0.9999 by default). Components carry a
/// deterministic sign: the largest-magnitude entry of each is positive.
FittedTransform fit(const Eigen::MatrixXd& train_rows, const std::string& layout_version,
                    double target_evr = 0.9999);

/// y = C * ((x - mean) / scale), row-wise. Throws FitError on layout mismatch.
Eigen::MatrixXd apply(const FittedTransform& t, const Eigen::MatrixXd& rows,
                      const std::string& layout_version);

nlohmann::json to_json(const FittedTransform& t);
FittedTransform transform_from_json(const nlohmann::json& j);

}  // namespace fitcrf::transform
