#include "fitcrf/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/QR>

#include "fitcrf/error.hpp"

namespace fitcrf::models {

using nlohmann::json;

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::linear: return "linear";
        case ModelKind::dense_regressor: return "dense_regressor";
        case ModelKind::dense_classifier: return "dense_classifier";
    }
    throw Error("bad model kind");
}

ModelKind kind_from_string(const std::string& s) {
    if (s == "linear") return ModelKind::linear;
    if (s == "dense_regressor") return ModelKind::dense_regressor;
    if (s == "dense_classifier") return ModelKind::dense_classifier;
    throw DataError("unknown model kind: '" + s + "'");
}

// ---------------------------------------------------------------------------
// Linear baseline

LinearModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size()) throw FitError("fit_linear: row count mismatch");
    if (x.rows() < 1) throw FitError("fit_linear: empty design");
    if (!x.allFinite() || !y.allFinite()) throw FitError("fit_linear: non-finite data");

    Eigen::MatrixXd design(x.rows(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    LinearModel m;
    Eigen::VectorXd beta;
    if (qr.rank() < design.cols()) {
        // Minimum-norm solution for rank-deficient designs.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
        beta = cod.solve(y);
        m.rank_deficient = true;
    } else {
        beta = qr.solve(y);
    }
    m.intercept = beta[0];
    m.coef = beta.tail(x.cols());
    return m;
}

Eigen::VectorXd predict_linear(const LinearModel& m, const Eigen::MatrixXd& x) {
    if (x.cols() != m.coef.size()) throw FitError("predict_linear: feature count mismatch");
    return (x * m.coef).array() + m.intercept;
}

// ---------------------------------------------------------------------------
// Dense network

void TrainConfig::validate() const {
    if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
    if (max_epochs <= 0 || batch_size <= 0) throw ConfigError("epochs/batch size must be positive");
    if (early_stop_patience <= 0 || lr_patience <= 0) throw ConfigError("patience must be positive");
    if (!(validation_fraction > 0 && validation_fraction < 1)) {
        throw ConfigError("validation_fraction must be in (0, 1)");
    }
    if (!(dropout >= 0 && dropout < 1)) throw ConfigError("dropout must be in [0, 1)");
    if (hidden_width <= 0) throw ConfigError("hidden_width must be positive");
}

namespace {

Eigen::MatrixXd elu(const Eigen::MatrixXd& a) {
    return a.unaryExpr([](double v) { return v >= 0 ? v : std::expm1(v); });
}

Eigen::MatrixXd elu_prime(const Eigen::MatrixXd& a) {
    return a.unaryExpr([](double v) { return v >= 0 ? 1.0 : std::exp(v); });
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Stable binary cross-entropy from logits, mean over the batch.
double bce_from_logits(const Eigen::VectorXd& logits, const Eigen::VectorXd& y) {
    double sum = 0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const double l = logits[i];
        sum += std::max(l, 0.0) - y[i] * l + std::log1p(std::exp(-std::abs(l)));
    }
    return sum / static_cast<double>(logits.size());
}

int hidden_blocks(ModelKind kind) {
    switch (kind) {
        case ModelKind::dense_regressor: return 2;
        case ModelKind::dense_classifier: return 1;
        case ModelKind::linear: break;
    }
    throw FitError("dense network requested for a linear model kind");
}

}  // namespace

DenseNet init_dense(ModelKind kind, int input_dim, std::uint64_t seed, int hidden_width,
                    double bn_epsilon) {
    if (input_dim <= 0) throw ConfigError("input_dim must be positive");
    const int blocks = hidden_blocks(kind);
    Rng rng(seed);
    DenseNet net;
    net.kind = kind;
    net.input_dim = input_dim;
    net.bn_epsilon = bn_epsilon;
    int fan_in = input_dim;
    for (int l = 0; l < blocks; ++l) {
        DenseLayer layer;
        layer.w.resize(fan_in, hidden_width);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + hidden_width));
        for (Eigen::Index i = 0; i < layer.w.rows(); ++i) {
            for (Eigen::Index j = 0; j < layer.w.cols(); ++j) {
                layer.w(i, j) = rng.uniform(-limit, limit);
            }
        }
        layer.b = Eigen::VectorXd::Zero(hidden_width);
        layer.gamma = Eigen::VectorXd::Ones(hidden_width);
        layer.beta = Eigen::VectorXd::Zero(hidden_width);
        layer.running_mean = Eigen::VectorXd::Zero(hidden_width);
        layer.running_var = Eigen::VectorXd::Ones(hidden_width);
        net.hidden.push_back(std::move(layer));
        fan_in = hidden_width;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + 1));
    net.w_out.resize(fan_in);
    for (Eigen::Index i = 0; i < net.w_out.size(); ++i) net.w_out[i] = rng.uniform(-limit, limit);
    net.b_out = 0.0;
    return net;
}

std::size_t DenseNet::param_count() const {
    std::size_t n = 0;
    for (const auto& l : hidden) {
        n += static_cast<std::size_t>(l.w.size()) + static_cast<std::size_t>(l.b.size()) +
             static_cast<std::size_t>(l.gamma.size()) + static_cast<std::size_t>(l.beta.size());
    }
    return n + static_cast<std::size_t>(w_out.size()) + 1;
}

// Flat layout: per hidden block W (row-major), b, gamma, beta; then w_out, b_out.
Eigen::VectorXd DenseNet::flatten_params() const {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(param_count()));
    Eigen::Index k = 0;
    for (const auto& l : hidden) {
        for (Eigen::Index i = 0; i < l.w.rows(); ++i)
            for (Eigen::Index j = 0; j < l.w.cols(); ++j) theta[k++] = l.w(i, j);
        for (Eigen::Index i = 0; i < l.b.size(); ++i) theta[k++] = l.b[i];
        for (Eigen::Index i = 0; i < l.gamma.size(); ++i) theta[k++] = l.gamma[i];
        for (Eigen::Index i = 0; i < l.beta.size(); ++i) theta[k++] = l.beta[i];
    }
    for (Eigen::Index i = 0; i < w_out.size(); ++i) theta[k++] = w_out[i];
    theta[k++] = b_out;
    return theta;
}

void DenseNet::unflatten_params(const Eigen::VectorXd& theta) {
    if (theta.size() != static_cast<Eigen::Index>(param_count())) {
        throw FitError("parameter vector size mismatch");
    }
    Eigen::Index k = 0;
    for (auto& l : hidden) {
        for (Eigen::Index i = 0; i < l.w.rows(); ++i)
            for (Eigen::Index j = 0; j < l.w.cols(); ++j) l.w(i, j) = theta[k++];
        for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b[i] = theta[k++];
        for (Eigen::Index i = 0; i < l.gamma.size(); ++i) l.gamma[i] = theta[k++];
        for (Eigen::Index i = 0; i < l.beta.size(); ++i) l.beta[i] = theta[k++];
    }
    for (Eigen::Index i = 0; i < w_out.size(); ++i) w_out[i] = theta[k++];
    b_out = theta[k++];
}

DropoutMasks draw_masks(Rng& rng, const DenseNet& net, Eigen::Index batch, double dropout_p) {
    const double keep = 1.0 - dropout_p;
    DropoutMasks masks;
    for (const auto& l : net.hidden) {
        Eigen::MatrixXd m(batch, l.w.cols());
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                m(i, j) = rng.bernoulli(keep) ? 1.0 : 0.0;
            }
        }
        masks.layer.push_back(std::move(m));
    }
    return masks;
}

namespace {

struct LayerCache {
    Eigen::MatrixXd input;  // block input
    Eigen::MatrixXd a;      // pre-activation
    Eigen::MatrixXd xhat;   // normalized post-activation
    Eigen::VectorXd istd;   // 1 / sqrt(var + eps)
};

/// Training-mode forward: batch statistics, dropout masks applied.
Eigen::VectorXd forward_training(const DenseNet& net, const Eigen::MatrixXd& x,
                                 const DropoutMasks& masks, double dropout_p,
                                 std::vector<LayerCache>* caches, BatchStats* stats) {
    const double keep = 1.0 - dropout_p;
    const double batch = static_cast<double>(x.rows());
    Eigen::MatrixXd cur = x;
    for (std::size_t li = 0; li < net.hidden.size(); ++li) {
        const auto& l = net.hidden[li];
        LayerCache cache;
        cache.input = cur;
        cache.a = cur * l.w;
        cache.a.rowwise() += l.b.transpose();
        Eigen::MatrixXd e = elu(cache.a);
        Eigen::VectorXd mu = e.colwise().mean().transpose();
        Eigen::MatrixXd ec = e.rowwise() - mu.transpose();
        Eigen::VectorXd var = ec.colwise().squaredNorm().transpose() / batch;
        cache.istd = (var.array() + net.bn_epsilon).sqrt().inverse().matrix();
        cache.xhat = ec * cache.istd.asDiagonal();
        Eigen::MatrixXd z = cache.xhat * l.gamma.asDiagonal();
        z.rowwise() += l.beta.transpose();
        cur = z.cwiseProduct(masks.layer[li]) / keep;
        if (caches) caches->push_back(std::move(cache));
        if (stats) {
            stats->mean.push_back(mu);
            stats->var.push_back(var);
        }
    }
    Eigen::VectorXd out = cur * net.w_out;
    out.array() += net.b_out;
    return out;  // regressor output / classifier logits
}

Eigen::MatrixXd forward_inference_hidden(const DenseNet& net, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd cur = x;
    for (const auto& l : net.hidden) {
        Eigen::MatrixXd a = cur * l.w;
        a.rowwise() += l.b.transpose();
        Eigen::MatrixXd e = elu(a);
        const Eigen::VectorXd istd =
            (l.running_var.array() + net.bn_epsilon).sqrt().inverse().matrix();
        Eigen::MatrixXd xhat = (e.rowwise() - l.running_mean.transpose()) * istd.asDiagonal();
        cur = xhat * l.gamma.asDiagonal();
        cur.rowwise() += l.beta.transpose();
    }
    return cur;
}

Eigen::VectorXd forward_inference_raw(const DenseNet& net, const Eigen::MatrixXd& x) {
    Eigen::VectorXd out = forward_inference_hidden(net, x) * net.w_out;
    out.array() += net.b_out;
    return out;
}

}  // namespace

Eigen::VectorXd forward_inference(const DenseNet& net, const Eigen::MatrixXd& x) {
    if (x.cols() != net.input_dim) throw FitError("forward: input width mismatch");
    Eigen::VectorXd raw = forward_inference_raw(net, x);
    if (net.kind == ModelKind::dense_classifier) {
        for (Eigen::Index i = 0; i < raw.size(); ++i) {
            raw[i] = std::clamp(sigmoid(raw[i]), 1e-300, 1.0 - 1e-16);
        }
    }
    return raw;
}

Eigen::MatrixXd penultimate_activations(const DenseNet& net, const Eigen::MatrixXd& x) {
    if (x.cols() != net.input_dim) throw FitError("forward: input width mismatch");
    return forward_inference_hidden(net, x);
}

double loss_and_gradients(const DenseNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const DropoutMasks& masks, double dropout_p, Eigen::VectorXd* grad_flat,
                          BatchStats* stats) {
    if (x.rows() != y.size()) throw FitError("loss: batch size mismatch");
    if (masks.layer.size() != net.hidden.size()) throw FitError("loss: mask count mismatch");
    const double batch = static_cast<double>(x.rows());
    const double keep = 1.0 - dropout_p;

    std::vector<LayerCache> caches;
    caches.reserve(net.hidden.size());
    Eigen::VectorXd out = forward_training(net, x, masks, dropout_p, &caches, stats);

    double loss = 0;
    Eigen::VectorXd dout(out.size());
    if (net.kind == ModelKind::dense_regressor) {
        const Eigen::VectorXd err = out - y;
        loss = err.squaredNorm() / batch;
        dout = 2.0 * err / batch;
    } else {
        loss = bce_from_logits(out, y);
        for (Eigen::Index i = 0; i < out.size(); ++i) dout[i] = (sigmoid(out[i]) - y[i]) / batch;
    }
    if (!grad_flat) return loss;

    DenseNet grads = net;  // reuse shapes; values overwritten below
    {
        // Output layer: out = d_last * w_out + b_out, with d_last recomputed
        // from the cached normalized activations.
        const auto& c = caches.back();
        const auto& l = net.hidden.back();
        Eigen::MatrixXd z = c.xhat * l.gamma.asDiagonal();
        z.rowwise() += l.beta.transpose();
        const Eigen::MatrixXd d_last = z.cwiseProduct(masks.layer.back()) / keep;
        grads.w_out = d_last.transpose() * dout;
        grads.b_out = dout.sum();
    }

    Eigen::MatrixXd d_cur = dout * net.w_out.transpose();  // gradient wrt block output
    for (std::size_t li = net.hidden.size(); li-- > 0;) {
        const auto& l = net.hidden[li];
        const auto& c = caches[li];
        auto& g = grads.hidden[li];

        Eigen::MatrixXd dz = d_cur.cwiseProduct(masks.layer[li]) / keep;
        g.beta = dz.colwise().sum().transpose();
        g.gamma = dz.cwiseProduct(c.xhat).colwise().sum().transpose();

        Eigen::MatrixXd dxhat = dz * l.gamma.asDiagonal();
        // Batch-norm backward through the batch mean and variance.
        const Eigen::RowVectorXd s1 = dxhat.colwise().sum();
        const Eigen::RowVectorXd s2 = dxhat.cwiseProduct(c.xhat).colwise().sum();
        Eigen::MatrixXd de = batch * dxhat;
        de.rowwise() -= s1;
        de -= c.xhat * s2.transpose().asDiagonal();
        de = de * (c.istd / batch).asDiagonal();

        Eigen::MatrixXd da = de.cwiseProduct(elu_prime(c.a));
        g.w = c.input.transpose() * da;
        g.b = da.colwise().sum().transpose();
        d_cur = da * l.w.transpose();
    }
    *grad_flat = grads.flatten_params();
    return loss;
}

double inference_loss(const DenseNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd raw = forward_inference_raw(net, x);
    if (net.kind == ModelKind::dense_regressor) {
        return (raw - y).squaredNorm() / static_cast<double>(raw.size());
    }
    return bce_from_logits(raw, y);
}

TrainResult train_dense_core(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const TrainConfig& cfg, ModelKind kind) {
    cfg.validate();
    const Eigen::Index n = x.rows();
    if (n != y.size()) throw TrainError("train: row/label count mismatch");
    if (n < 2) throw TrainError("train: need at least 2 rows");
    if (!x.allFinite() || !y.allFinite()) throw TrainError("train: non-finite inputs");
    if (kind == ModelKind::dense_classifier) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (y[i] != 0.0 && y[i] != 1.0) throw TrainError("classifier labels must be 0 or 1");
        }
    }

    // Random 10% of the training rows held out for validation.
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Rng split_rng(mix_seed(cfg.seed, 101));
    split_rng.shuffle(perm);
    const Eigen::Index n_val = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(n) * cfg.validation_fraction));
    if (n_val == 0) throw ConfigError("validation split is empty; need more rows");
    const Eigen::Index n_train = n - n_val;
    if (n_train == 0) throw ConfigError("training split is empty");

    Eigen::MatrixXd x_val(n_val, x.cols()), x_train(n_train, x.cols());
    Eigen::VectorXd y_val(n_val), y_train(n_train);
    for (Eigen::Index i = 0; i < n_val; ++i) {
        x_val.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
        y_val[i] = y[perm[static_cast<std::size_t>(i)]];
    }
    for (Eigen::Index i = 0; i < n_train; ++i) {
        x_train.row(i) = x.row(perm[static_cast<std::size_t>(n_val + i)]);
        y_train[i] = y[perm[static_cast<std::size_t>(n_val + i)]];
    }

    DenseNet net = init_dense(kind, static_cast<int>(x.cols()), mix_seed(cfg.seed, 202),
                              cfg.hidden_width, cfg.bn_epsilon);
    Eigen::VectorXd theta = net.flatten_params();
    Eigen::VectorXd adam_m = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd adam_v = Eigen::VectorXd::Zero(theta.size());
    long long adam_t = 0;
    double lr = cfg.learning_rate;

    Rng train_rng(mix_seed(cfg.seed, 303));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
    for (Eigen::Index i = 0; i < n_train; ++i) order[static_cast<std::size_t>(i)] = i;

    History history;
    double best_val = std::numeric_limits<double>::infinity();
    DenseNet best_net = net;
    int no_improve = 0, no_improve_lr = 0;

    Eigen::VectorXd grad;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        train_rng.shuffle(order);
        double loss_sum = 0;
        for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
            const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n_train - start);
            Eigen::MatrixXd xb(b, x.cols());
            Eigen::VectorXd yb(b);
            for (Eigen::Index i = 0; i < b; ++i) {
                xb.row(i) = x_train.row(order[static_cast<std::size_t>(start + i)]);
                yb[i] = y_train[order[static_cast<std::size_t>(start + i)]];
            }
            const DropoutMasks masks = draw_masks(train_rng, net, b, cfg.dropout);
            BatchStats stats;
            const double loss = loss_and_gradients(net, xb, yb, masks, cfg.dropout, &grad, &stats);
            if (!std::isfinite(loss)) {
                throw TrainError("non-finite loss at epoch " + std::to_string(epoch));
            }
            loss_sum += loss * static_cast<double>(b);

            ++adam_t;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_t));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_t));
            adam_m = cfg.adam_beta1 * adam_m + (1.0 - cfg.adam_beta1) * grad;
            adam_v = (cfg.adam_beta2 * adam_v.array() +
                      (1.0 - cfg.adam_beta2) * grad.array().square())
                         .matrix();
            theta.array() -=
                lr * (adam_m.array() / bc1) / ((adam_v.array() / bc2).sqrt() + cfg.adam_epsilon);
            net.unflatten_params(theta);

            for (std::size_t li = 0; li < net.hidden.size(); ++li) {
                auto& l = net.hidden[li];
                l.running_mean =
                    cfg.bn_momentum * l.running_mean + (1.0 - cfg.bn_momentum) * stats.mean[li];
                l.running_var =
                    cfg.bn_momentum * l.running_var + (1.0 - cfg.bn_momentum) * stats.var[li];
            }
        }

        EpochStats es;
        es.train_loss = loss_sum / static_cast<double>(n_train);
        es.val_loss = inference_loss(net, x_val, y_val);
        es.learning_rate = lr;
        history.epochs.push_back(es);

        if (es.val_loss < best_val) {
            best_val = es.val_loss;
            history.best_epoch = epoch;
            best_net = net;
            no_improve = 0;
            no_improve_lr = 0;
        } else {
            ++no_improve;
            ++no_improve_lr;
            if (no_improve_lr >= cfg.lr_patience) {
                lr *= cfg.lr_factor;
                no_improve_lr = 0;
            }
            if (no_improve >= cfg.early_stop_patience) break;
        }
    }
    return {std::move(best_net), std::move(history)};
}

ModelBundle train_dense(const Eigen::MatrixXd& x_projected, const Eigen::VectorXd& y,
                        const TrainConfig& cfg, ModelKind kind,
                        const transform::FittedTransform& t,
                        std::vector<std::size_t> feature_indices, std::string task) {
    TrainResult result = train_dense_core(x_projected, y, cfg, kind);
    ModelBundle bundle;
    bundle.task = std::move(task);
    bundle.seed = cfg.seed;
    bundle.layout_version = t.layout_version;
    bundle.feature_indices = std::move(feature_indices);
    bundle.transform = t;
    bundle.kind = kind;
    bundle.net = std::move(result.net);
    bundle.config = cfg;
    bundle.history = std::move(result.history);
    return bundle;
}

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<std::size_t>& indices) {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= static_cast<std::size_t>(x.cols())) {
            throw FitError("feature index out of range");
        }
        out.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(indices[j]));
    }
    return out;
}

}  // namespace

Eigen::VectorXd predict(const ModelBundle& bundle, const Eigen::MatrixXd& raw_features,
                        const std::string& layout_version) {
    if (layout_version != bundle.layout_version) {
        throw FitError("layout mismatch: bundle " + bundle.layout_version + " vs data " +
                       layout_version);
    }
    const Eigen::MatrixXd selected = select_columns(raw_features, bundle.feature_indices);
    const Eigen::MatrixXd projected =
        transform::apply(bundle.transform, selected, bundle.transform.layout_version);
    if (bundle.kind == ModelKind::linear) return predict_linear(bundle.linear, projected);
    return forward_inference(bundle.net, projected);
}

Eigen::VectorXd predict(const ModelBundle& bundle,
                        const std::vector<featurize::FeatureVector>& rows) {
    if (rows.empty()) return Eigen::VectorXd(0);
    return predict(bundle, featurize::to_matrix(rows), rows.front().layout_version);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (rows.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
        }
    }
    return m;
}

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

json config_to_json(const TrainConfig& c) {
    json j;
    j["learning_rate"] = c.learning_rate;
    j["adam_beta1"] = c.adam_beta1;
    j["adam_beta2"] = c.adam_beta2;
    j["adam_epsilon"] = c.adam_epsilon;
    j["max_epochs"] = c.max_epochs;
    j["batch_size"] = c.batch_size;
    j["early_stop_patience"] = c.early_stop_patience;
    j["lr_patience"] = c.lr_patience;
    j["lr_factor"] = c.lr_factor;
    j["validation_fraction"] = c.validation_fraction;
    j["dropout"] = c.dropout;
    j["bn_momentum"] = c.bn_momentum;
    j["bn_epsilon"] = c.bn_epsilon;
    j["hidden_width"] = c.hidden_width;
    j["seed"] = c.seed;
    return j;
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_epsilon = j.at("adam_epsilon").get<double>();
    c.max_epochs = j.at("max_epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.early_stop_patience = j.at("early_stop_patience").get<int>();
    c.lr_patience = j.at("lr_patience").get<int>();
    c.lr_factor = j.at("lr_factor").get<double>();
    c.validation_fraction = j.at("validation_fraction").get<double>();
    c.dropout = j.at("dropout").get<double>();
    c.bn_momentum = j.at("bn_momentum").get<double>();
    c.bn_epsilon = j.at("bn_epsilon").get<double>();
    c.hidden_width = j.at("hidden_width").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

json to_json(const ModelBundle& bundle) {
    json j;
    j["task"] = bundle.task;
    j["seed"] = bundle.seed;
    j["layout_version"] = bundle.layout_version;
    j["feature_indices"] = bundle.feature_indices;
    j["kind"] = to_string(bundle.kind);
    j["transform"] = transform::to_json(bundle.transform);
    if (bundle.kind == ModelKind::linear) {
        j["linear"] = {{"coef", vector_to_json(bundle.linear.coef)},
                       {"intercept", bundle.linear.intercept},
                       {"rank_deficient", bundle.linear.rank_deficient}};
    } else {
        j["config"] = config_to_json(bundle.config);
        json hist;
        hist["best_epoch"] = bundle.history.best_epoch;
        hist["epochs"] = json::array();
        for (const auto& e : bundle.history.epochs) {
            hist["epochs"].push_back({{"train_loss", e.train_loss},
                                      {"val_loss", e.val_loss},
                                      {"learning_rate", e.learning_rate}});
        }
        j["history"] = hist;
        json net;
        net["input_dim"] = bundle.net.input_dim;
        net["bn_epsilon"] = bundle.net.bn_epsilon;
        net["hidden"] = json::array();
        for (const auto& l : bundle.net.hidden) {
            net["hidden"].push_back({{"w", matrix_to_json(l.w)},
                                     {"b", vector_to_json(l.b)},
                                     {"gamma", vector_to_json(l.gamma)},
                                     {"beta", vector_to_json(l.beta)},
                                     {"running_mean", vector_to_json(l.running_mean)},
                                     {"running_var", vector_to_json(l.running_var)}});
        }
        net["w_out"] = vector_to_json(bundle.net.w_out);
        net["b_out"] = bundle.net.b_out;
        j["net"] = net;
    }
    return j;
}

ModelBundle bundle_from_json(const json& j) {
    ModelBundle bundle;
    bundle.task = j.at("task").get<std::string>();
    bundle.seed = j.at("seed").get<std::uint64_t>();
    bundle.layout_version = j.at("layout_version").get<std::string>();
    bundle.feature_indices = j.at("feature_indices").get<std::vector<std::size_t>>();
    bundle.kind = kind_from_string(j.at("kind").get<std::string>());
    bundle.transform = transform::transform_from_json(j.at("transform"));
    if (bundle.kind == ModelKind::linear) {
        bundle.linear.coef = vector_from_json(j.at("linear").at("coef"));
        bundle.linear.intercept = j.at("linear").at("intercept").get<double>();
        bundle.linear.rank_deficient = j.at("linear").at("rank_deficient").get<bool>();
    } else {
        bundle.config = config_from_json(j.at("config"));
        bundle.history.best_epoch = j.at("history").at("best_epoch").get<int>();
        for (const auto& e : j.at("history").at("epochs")) {
            bundle.history.epochs.push_back({e.at("train_loss").get<double>(),
                                             e.at("val_loss").get<double>(),
                                             e.at("learning_rate").get<double>()});
        }
        const auto& net = j.at("net");
        bundle.net.kind = bundle.kind;
        bundle.net.input_dim = net.at("input_dim").get<int>();
        bundle.net.bn_epsilon = net.at("bn_epsilon").get<double>();
        for (const auto& l : net.at("hidden")) {
            DenseLayer layer;
            layer.w = matrix_from_json(l.at("w"));
            layer.b = vector_from_json(l.at("b"));
            layer.gamma = vector_from_json(l.at("gamma"));
            layer.beta = vector_from_json(l.at("beta"));
            layer.running_mean = vector_from_json(l.at("running_mean"));
            layer.running_var = vector_from_json(l.at("running_var"));
            bundle.net.hidden.push_back(std::move(layer));
        }
        bundle.net.w_out = vector_from_json(net.at("w_out"));
        bundle.net.b_out = net.at("b_out").get<double>();
    }
    return bundle;
}

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write bundle: " + path.string());
    out << to_json(bundle).dump(2) << '\n';
}

ModelBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read bundle: " + path.string());
    json j;
    in >> j;
    return bundle_from_json(j);
}

// ---------------------------------------------------------------------------

double equation_baseline(double age_years, double rhr_bpm) {
    if (!(rhr_bpm > 0)) throw DataError("equation baseline requires a positive resting HR");
    const double hr_max = 208.0 - 0.7 * age_years;
    return 15.0 * hr_max / rhr_bpm;
}

double equation_baseline(const Participant& p) {
    return equation_baseline(p.age_years, p.rhr_bpm);
}

}  // namespace fitcrf::models
