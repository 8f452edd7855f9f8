#include "fitcrf/transform.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "fitcrf/error.hpp"

namespace fitcrf::transform {

using nlohmann::json;

FittedTransform fit(const Eigen::MatrixXd& train_rows, const std::string& layout_version,
                    double target_evr) {
    const Eigen::Index n = train_rows.rows();
    const Eigen::Index d = train_rows.cols();
    if (n < 2) throw FitError("transform fit needs at least 2 rows");
    if (!(target_evr > 0.0 && target_evr <= 1.0)) throw FitError("target_evr must be in (0, 1]");

    FittedTransform t;
    t.layout_version = layout_version;
    t.mean = train_rows.colwise().mean().transpose();
    Eigen::MatrixXd centered = train_rows.rowwise() - t.mean.transpose();

    t.scale.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double var = centered.col(j).squaredNorm() / static_cast<double>(n);
        if (var > 0) {
            t.scale[j] = std::sqrt(var);
        } else {
            t.scale[j] = 1.0;  // constant feature: avoid division by zero
            t.warnings.push_back("constant feature at column " + std::to_string(j) +
                                 "; scale set to 1");
        }
    }
    Eigen::MatrixXd z = centered * t.scale.cwiseInverse().asDiagonal();

    // Population covariance of the standardized data; d is small (<= 68), so
    // a dense symmetric eigendecomposition is exact and cheap.
    Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw FitError("eigendecomposition failed");

    // Eigen returns ascending order; flip to descending and clamp the
    // numerical-noise negatives to zero.
    Eigen::VectorXd eig = solver.eigenvalues().reverse();
    Eigen::MatrixXd vec = solver.eigenvectors().rowwise().reverse();
    for (Eigen::Index i = 0; i < eig.size(); ++i) eig[i] = std::max(eig[i], 0.0);

    const double total = eig.sum();
    if (!(total > 0)) throw FitError("training data has zero total variance");

    Eigen::Index k = 0;
    double cum = 0;
    while (k < d) {
        cum += eig[k];
        ++k;
        if (cum / total >= target_evr) break;
    }

    t.components.resize(k, d);
    t.explained_variance.resize(k);
    t.explained_variance_ratio.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        Eigen::VectorXd c = vec.col(i);
        Eigen::Index argmax = 0;
        c.cwiseAbs().maxCoeff(&argmax);
        if (c[argmax] < 0) c = -c;  // deterministic sign for reproducible serialization
        t.components.row(i) = c.transpose();
        t.explained_variance[i] = eig[i];
        t.explained_variance_ratio[static_cast<std::size_t>(i)] = eig[i] / total;
    }
    return t;
}

Eigen::MatrixXd apply(const FittedTransform& t, const Eigen::MatrixXd& rows,
                      const std::string& layout_version) {
    if (layout_version != t.layout_version) {
        throw FitError("layout mismatch: transform was fit against " + t.layout_version +
                       ", data is " + layout_version);
    }
    if (rows.cols() != t.mean.size()) {
        throw FitError("transform expects " + std::to_string(t.mean.size()) + " features, got " +
                       std::to_string(rows.cols()));
    }
    Eigen::MatrixXd z =
        (rows.rowwise() - t.mean.transpose()).array().rowwise() / t.scale.transpose().array();
    return z * t.components.transpose();
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

}  // namespace

json to_json(const FittedTransform& t) {
    json j;
    j["layout_version"] = t.layout_version;
    j["mean"] = vector_to_json(t.mean);
    j["scale"] = vector_to_json(t.scale);
    j["explained_variance"] = vector_to_json(t.explained_variance);
    j["explained_variance_ratio"] = t.explained_variance_ratio;
    j["warnings"] = t.warnings;
    json comps = json::array();
    for (Eigen::Index i = 0; i < t.components.rows(); ++i) {
        comps.push_back(vector_to_json(t.components.row(i)));
    }
    j["components"] = comps;
    return j;
}

FittedTransform transform_from_json(const json& j) {
    FittedTransform t;
    t.layout_version = j.at("layout_version").get<std::string>();
    t.mean = vector_from_json(j.at("mean"));
    t.scale = vector_from_json(j.at("scale"));
    t.explained_variance = vector_from_json(j.at("explained_variance"));
    t.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
    t.warnings = j.at("warnings").get<std::vector<std::string>>();
    const auto& comps = j.at("components");
    t.components.resize(static_cast<Eigen::Index>(comps.size()), t.mean.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        t.components.row(static_cast<Eigen::Index>(i)) =
            vector_from_json(comps[i]).transpose();
    }
    return t;
}

}  // namespace fitcrf::transform
