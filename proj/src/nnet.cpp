#include "advfront/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "advfront/error.hpp"

namespace advfront {

namespace {

constexpr double kLogProbFloor = -80.0;

void check_labels(std::span<const int> labels, std::size_t rows, std::size_t classes) {
    if (labels.size() != rows) {
        throw ShapeError("label count " + std::to_string(labels.size()) + " does not match batch rows " +
                         std::to_string(rows));
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
            throw InputError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                             " outside [0, " + std::to_string(classes) + ")");
        }
    }
}

// out = in * W^T + b
Matrix affine(const Matrix& in, const DenseLayer& layer) {
    const std::size_t n = in.rows();
    const std::size_t out_dim = layer.out();
    const std::size_t in_dim = layer.in();
    Matrix out(n, out_dim);
    for (std::size_t r = 0; r < n; ++r) {
        const auto x = in.row(r);
        auto y = out.row(r);
        for (std::size_t o = 0; o < out_dim; ++o) {
            const auto w = layer.weight.row(o);
            double acc = layer.bias[o];
            for (std::size_t k = 0; k < in_dim; ++k) {
                acc += w[k] * x[k];
            }
            y[o] = acc;
        }
    }
    return out;
}

void check_finite(const Matrix& m, std::size_t layer, const char* what) {
    if (!m.all_finite()) {
        throw NumericError(std::string("non-finite ") + what + " at layer " + std::to_string(layer));
    }
}

// Pre-activations of every layer; the last entry holds the logits.
std::vector<Matrix> forward_trace(const MlpModel& model, const Matrix& batch) {
    if (model.layers.empty()) {
        throw ShapeError("model has no layers");
    }
    if (batch.cols() != model.input_dim()) {
        throw ShapeError("batch has " + std::to_string(batch.cols()) + " columns, model expects " +
                         std::to_string(model.input_dim()));
    }
    std::vector<Matrix> pre;
    pre.reserve(model.layers.size());
    const Matrix* input = &batch;
    Matrix activated;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        pre.push_back(affine(*input, model.layers[l]));
        check_finite(pre.back(), l, "pre-activation");
        if (l + 1 < model.layers.size()) {
            activated = pre.back();
            for (double& v : activated.data()) {
                v = std::max(v, 0.0);
            }
            input = &activated;
        }
    }
    return pre;
}

Matrix relu(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.data()) {
        v = std::max(v, 0.0);
    }
    return out;
}

std::vector<double> log_softmax_row(std::span<const double> logits) {
    const double mx = *std::ranges::max_element(logits);
    double sum = 0.0;
    for (double z : logits) {
        sum += std::exp(z - mx);
    }
    const double lse = mx + std::log(sum);
    std::vector<double> out(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = logits[k] - lse;
    }
    return out;
}

std::span<const double> reference_row(const LossKind& loss, std::size_t r, std::size_t rows, std::size_t classes) {
    const Matrix& ref = loss.reference;
    if (ref.cols() != classes || (ref.rows() != rows && ref.rows() != 1)) {
        throw ShapeError("KL reference must be [n x m] or [1 x m]");
    }
    return ref.row(ref.rows() == 1 ? 0 : r);
}

// Loss of one row and its gradient w.r.t. that row's logits.
double row_loss(const LossKind& loss, std::span<const double> logits, std::span<const double> probs,
                std::size_t label, std::span<const double> reference, std::span<double> dlogits) {
    const std::size_t m = logits.size();
    switch (loss.kind) {
        case LossKind::Kind::cross_entropy:
        case LossKind::Kind::kl_to_reference: {
            // -sum_k r_k * max(log p_k, floor) (+ sum_k r_k log r_k for KL).
            const auto logp = log_softmax_row(logits);
            double value = 0.0;
            double active_mass = 0.0;
            std::vector<bool> active(m);
            for (std::size_t k = 0; k < m; ++k) {
                const double r = loss.kind == LossKind::Kind::cross_entropy ? (k == label ? 1.0 : 0.0)
                                                                            : reference[k];
                active[k] = logp[k] > kLogProbFloor;
                value -= r * std::max(logp[k], kLogProbFloor);
                if (loss.kind == LossKind::Kind::kl_to_reference && r > 0.0) {
                    value += r * std::log(r);
                }
                if (active[k]) {
                    active_mass += r;
                }
            }
            for (std::size_t j = 0; j < m; ++j) {
                const double r = loss.kind == LossKind::Kind::cross_entropy ? (j == label ? 1.0 : 0.0)
                                                                            : reference[j];
                dlogits[j] = probs[j] * active_mass - (active[j] ? r : 0.0);
            }
            return value;
        }
        case LossKind::Kind::margin: {
            const std::size_t other = runner_up_class(probs, label);
            const double mar = probs[label] - probs[other];
            if (mar <= 0.0) {
                std::ranges::fill(dlogits, 0.0);
                return 0.0;
            }
            // d(p_y - p_o)/dz_j = p_j * (g_j - sum_k g_k p_k), g = e_y - e_o.
            const double mean_g = probs[label] - probs[other];
            for (std::size_t j = 0; j < m; ++j) {
                const double g = (j == label ? 1.0 : 0.0) - (j == other ? 1.0 : 0.0);
                dlogits[j] = probs[j] * (g - mean_g);
            }
            return std::min(mar, 1.0);
        }
    }
    return 0.0;
}

GradientResult loss_and_grads(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                              const LossKind& loss, bool want_params) {
    const auto pre = forward_trace(model, batch);
    const Matrix& logits = pre.back();
    const Matrix probs = softmax_rows(logits);
    const std::size_t n = batch.rows();
    const std::size_t m = model.num_classes;
    const bool uses_labels = loss.kind != LossKind::Kind::kl_to_reference;
    if (uses_labels) {
        check_labels(labels, n, m);
    }

    GradientResult result;
    Matrix delta(n, m);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t label = uses_labels ? static_cast<std::size_t>(labels[r]) : 0;
        const auto ref = loss.kind == LossKind::Kind::kl_to_reference ? reference_row(loss, r, n, m)
                                                                       : std::span<const double>{};
        result.loss_value += row_loss(loss, logits.row(r), probs.row(r), label, ref, delta.row(r));
    }
    const std::size_t last = model.layers.size() - 1;
    check_finite(delta, last, "loss gradient");

    if (want_params) {
        result.param_grads.emplace(model.layers.size());
    }
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const DenseLayer& layer = model.layers[l];
        if (want_params) {
            const Matrix input = l == 0 ? batch : relu(pre[l - 1]);
            LayerGradient g{Matrix(layer.out(), layer.in()), std::vector<double>(layer.out(), 0.0)};
            for (std::size_t r = 0; r < n; ++r) {
                const auto d = delta.row(r);
                const auto a = input.row(r);
                for (std::size_t o = 0; o < layer.out(); ++o) {
                    if (d[o] == 0.0) {
                        continue;
                    }
                    auto gw = g.weight.row(o);
                    for (std::size_t k = 0; k < layer.in(); ++k) {
                        gw[k] += d[o] * a[k];
                    }
                    g.bias[o] += d[o];
                }
            }
            (*result.param_grads)[l] = std::move(g);
        }
        // Propagate to the layer input.
        Matrix below(n, layer.in());
        for (std::size_t r = 0; r < n; ++r) {
            const auto d = delta.row(r);
            auto b = below.row(r);
            for (std::size_t o = 0; o < layer.out(); ++o) {
                if (d[o] == 0.0) {
                    continue;
                }
                const auto w = layer.weight.row(o);
                for (std::size_t k = 0; k < layer.in(); ++k) {
                    b[k] += d[o] * w[k];
                }
            }
        }
        check_finite(below, l, "backward signal");
        if (l > 0) {
            const Matrix& z = pre[l - 1];
            for (std::size_t i = 0; i < below.size(); ++i) {
                if (!(z.data()[i] > 0.0)) {
                    below.data()[i] = 0.0;
                }
            }
        }
        delta = std::move(below);
    }
    result.input_grad = std::move(delta);
    if (!std::isfinite(result.loss_value)) {
        throw NumericError("non-finite loss value");
    }
    return result;
}

}  // namespace

std::size_t MlpModel::input_dim() const {
    if (layers.empty()) {
        throw ShapeError("model has no layers");
    }
    return layers.front().in();
}

void MlpModel::validate() const {
    if (layers.empty()) {
        throw ShapeError("model has no layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.in() == 0 || layer.out() == 0) {
            throw ShapeError("layer " + std::to_string(l) + " has a zero dimension");
        }
        if (layer.bias.size() != layer.out()) {
            throw ShapeError("layer " + std::to_string(l) + " bias length " + std::to_string(layer.bias.size()) +
                             " does not equal out " + std::to_string(layer.out()));
        }
        if (l + 1 < layers.size() && layers[l + 1].in() != layer.out()) {
            throw ShapeError("layer " + std::to_string(l) + " out " + std::to_string(layer.out()) +
                             " does not chain into layer " + std::to_string(l + 1) + " in " +
                             std::to_string(layers[l + 1].in()));
        }
        if (!layer.weight.all_finite() ||
            !std::ranges::all_of(layer.bias, [](double v) { return std::isfinite(v); })) {
            throw NumericError("non-finite parameter in layer " + std::to_string(l));
        }
    }
    if (layers.back().out() != num_classes) {
        throw ShapeError("final layer out " + std::to_string(layers.back().out()) + " does not equal classes " +
                         std::to_string(num_classes));
    }
    if (num_classes < 2) {
        throw ShapeError("a classifier needs at least two classes");
    }
}

MlpModel make_mlp(std::span<const std::size_t> dims, std::uint64_t seed) {
    MlpModel model = make_zero_mlp(dims);
    std::mt19937_64 rng(seed);
    for (auto& layer : model.layers) {
        const double bound = std::sqrt(6.0 / static_cast<double>(layer.in()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : layer.weight.data()) {
            w = dist(rng);
        }
    }
    return model;
}

MlpModel make_zero_mlp(std::span<const std::size_t> dims) {
    if (dims.size() < 2) {
        throw ConfigError("an MLP needs at least input and output widths");
    }
    MlpModel model;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        model.layers.push_back({Matrix(dims[l + 1], dims[l]), std::vector<double>(dims[l + 1], 0.0)});
    }
    model.num_classes = dims.back();
    model.validate();
    return model;
}

Matrix forward_logits(const MlpModel& model, const Matrix& batch) {
    return forward_trace(model, batch).back();
}

Matrix forward(const MlpModel& model, const Matrix& batch) {
    return softmax_rows(forward_logits(model, batch));
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const auto z = logits.row(r);
        auto p = out.row(r);
        const double mx = *std::ranges::max_element(z);
        double sum = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            p[k] = std::exp(z[k] - mx);
            sum += p[k];
        }
        for (double& v : p) {
            v /= sum;
        }
    }
    return out;
}

std::vector<int> argmax_rows(const Matrix& probs) {
    std::vector<int> out(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const auto p = probs.row(r);
        out[r] = static_cast<int>(std::ranges::max_element(p) - p.begin());
    }
    return out;
}

std::size_t runner_up_class(std::span<const double> probs, std::size_t label) {
    std::size_t best = label == 0 ? 1 : 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (k != label && probs[k] > probs[best]) {
            best = k;
        }
    }
    return best;
}

std::vector<double> signed_margin(const Matrix& probs, std::span<const int> labels) {
    check_labels(labels, probs.rows(), probs.cols());
    std::vector<double> out(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const auto p = probs.row(r);
        const auto y = static_cast<std::size_t>(labels[r]);
        out[r] = std::clamp(p[y] - p[runner_up_class(p, y)], -1.0, 1.0);
    }
    return out;
}

std::vector<double> margin_confidence(const Matrix& probs, std::span<const int> labels) {
    auto out = signed_margin(probs, labels);
    for (double& v : out) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

GradientResult loss_and_input_grad(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                                   const LossKind& loss) {
    return loss_and_grads(model, batch, labels, loss, false);
}

GradientResult loss_and_param_grads(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                                    const LossKind& loss) {
    return loss_and_grads(model, batch, labels, loss, true);
}

std::vector<double> loss_values(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                                const LossKind& loss) {
    const Matrix logits = forward_logits(model, batch);
    const Matrix probs = softmax_rows(logits);
    const std::size_t n = batch.rows();
    const std::size_t m = model.num_classes;
    const bool uses_labels = loss.kind != LossKind::Kind::kl_to_reference;
    if (uses_labels) {
        check_labels(labels, n, m);
    }
    std::vector<double> out(n);
    std::vector<double> scratch(m);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t label = uses_labels ? static_cast<std::size_t>(labels[r]) : 0;
        const auto ref = loss.kind == LossKind::Kind::kl_to_reference ? reference_row(loss, r, n, m)
                                                                       : std::span<const double>{};
        out[r] = row_loss(loss, logits.row(r), probs.row(r), label, ref, scratch);
    }
    return out;
}

}  // namespace advfront
