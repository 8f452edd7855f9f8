#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "fitcrf/featurize.hpp"
#include "fitcrf/rng.hpp"
#include "fitcrf/transform.hpp"
#include "fitcrf/types.hpp"

namespace fitcrf::models {

enum class ModelKind : int { linear = 0, dense_regressor = 1, dense_classifier = 2 };

std::string to_string(ModelKind k);
ModelKind kind_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Linear baseline

struct LinearModel {
    Eigen::VectorXd coef;
    double intercept = 0;
    bool rank_deficient = false;  // solved via pseudoinverse, warning emitted
};

/// Ordinary least squares with intercept. Rank-deficient designs fall back to
/// the minimum-norm pseudoinverse solution and set rank_deficient.
LinearModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
Eigen::VectorXd predict_linear(const LinearModel& m, const Eigen::MatrixXd& x);

// ---------------------------------------------------------------------------
// Dense network

struct TrainConfig {
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-7;
    int max_epochs = 300;
    int batch_size = 32;
    int early_stop_patience = 15;  // epochs without validation improvement
    int lr_patience = 5;           // plateau epochs before the learning rate drops
    double lr_factor = 0.1;
    double validation_fraction = 0.1;
    double dropout = 0.3;  // inverted scaling at train time
    double bn_momentum = 0.99;
    double bn_epsilon = 1e-3;
    int hidden_width = 128;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One hidden block: linear -> ELU -> batch norm -> dropout.
struct DenseLayer {
    Eigen::MatrixXd w;  // in x out
    Eigen::VectorXd b;
    Eigen::VectorXd gamma, beta;               // batch-norm scale / shift
    Eigen::VectorXd running_mean, running_var;  // inference statistics
};

struct DenseNet {
    ModelKind kind = ModelKind::dense_regressor;
    int input_dim = 0;
    std::vector<DenseLayer> hidden;  // 2 blocks for the regressor, 1 for the classifier
    Eigen::VectorXd w_out;
    double b_out = 0;
    double bn_epsilon = 1e-3;

    std::size_t param_count() const;
    Eigen::VectorXd flatten_params() const;
    void unflatten_params(const Eigen::VectorXd& theta);
};

/// Glorot-uniform weights, zero biases, identity batch-norm.
DenseNet init_dense(ModelKind kind, int input_dim, std::uint64_t seed, int hidden_width = 128,
                    double bn_epsilon = 1e-3);

/// Inference-mode outputs: dropout off, batch norm on running statistics.
/// Classifier outputs are sigmoid probabilities in (0, 1).
Eigen::VectorXd forward_inference(const DenseNet& net, const Eigen::MatrixXd& x);

/// Last hidden block's inference-mode output (the penultimate activations).
Eigen::MatrixXd penultimate_activations(const DenseNet& net, const Eigen::MatrixXd& x);

/// Per-layer dropout masks, entries in {0, 1}; fixed masks make a training
/// forward pass deterministic for gradient verification.
struct DropoutMasks {
    std::vector<Eigen::MatrixXd> layer;  // batch x width
};
DropoutMasks draw_masks(Rng& rng, const DenseNet& net, Eigen::Index batch, double dropout_p);

/// Per-layer batch statistics captured by a training-mode forward pass.
struct BatchStats {
    std::vector<Eigen::VectorXd> mean, var;  // biased variance
};

/// Training-mode loss and analytic gradients for every parameter, with the
/// dropout masks fixed for the call and batch-norm using batch statistics
/// (gradients flow through them). MSE for the regressor, binary cross-entropy
/// from logits for the classifier.
double loss_and_gradients(const DenseNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const DropoutMasks& masks, double dropout_p, Eigen::VectorXd* grad_flat,
                          BatchStats* stats = nullptr);

/// Inference-mode loss (used for validation tracking).
double inference_loss(const DenseNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct EpochStats {
    double train_loss = 0;
    double val_loss = 0;
    double learning_rate = 0;
};

struct History {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;  // 0-based index into epochs
};

// ---------------------------------------------------------------------------
// Bundles

struct ModelBundle {
    std::string task;
    std::uint64_t seed = 0;
    std::string layout_version;
    std::vector<std::size_t> feature_indices;  // columns fed into the transform
    transform::FittedTransform transform;
    ModelKind kind = ModelKind::linear;
    LinearModel linear;
    DenseNet net;
    TrainConfig config;
    History history;
};

struct TrainResult {
    DenseNet net;
    History history;
};

/// Backpropagation training with Adam, a random 10% validation split, early
/// stopping (best weights restored) and a plateau learning-rate schedule.
/// Deterministic given cfg.seed. x must already be transform-projected.
TrainResult train_dense_core(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const TrainConfig& cfg, ModelKind kind);

ModelBundle train_dense(const Eigen::MatrixXd& x_projected, const Eigen::VectorXd& y,
                        const TrainConfig& cfg, ModelKind kind,
                        const transform::FittedTransform& t,
                        std::vector<std::size_t> feature_indices, std::string task);

/// Applies the stored column selection + transform, then the model forward
/// pass in inference mode.
Eigen::VectorXd predict(const ModelBundle& bundle, const Eigen::MatrixXd& raw_features,
                        const std::string& layout_version);
Eigen::VectorXd predict(const ModelBundle& bundle, const std::vector<featurize::FeatureVector>& rows);

nlohmann::json to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& j);
void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Non-model equation baseline: age-predicted maximal HR (208 - 0.7*age)
// divided by resting HR, scaled by 15; weight-relative ml O2/min/kg.

double equation_baseline(double age_years, double rhr_bpm);
double equation_baseline(const Participant& p);

}  // namespace fitcrf::models
