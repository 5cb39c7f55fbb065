#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advfront/matrix.hpp"

namespace advfront {

enum class Activation { relu };

/// Fully connected layer computing `x * weight^T + bias`.
struct DenseLayer {
    Matrix weight;  // [out x in]
    std::vector<double> bias;  // [out]

    std::size_t in() const noexcept { return weight.cols(); }
    std::size_t out() const noexcept { return weight.rows(); }
};

/// Feed-forward softmax classifier. Hidden layers use `hidden_activation`,
/// the final layer produces logits for `num_classes` classes.
struct MlpModel {
    std::vector<DenseLayer> layers;
    Activation hidden_activation = Activation::relu;
    std::size_t num_classes = 0;
    std::map<std::string, std::string> meta;

    std::size_t input_dim() const;

    /// Throws ShapeError / NumericError when the layer chain is broken or a
    /// parameter is not finite.
    void validate() const;
};

/// Randomly initialised MLP with layer widths `dims` = {in, hidden..., classes}.
/// He-uniform weights, zero biases.
MlpModel make_mlp(std::span<const std::size_t> dims, std::uint64_t seed);

/// MLP with every weight and bias set to zero.
MlpModel make_zero_mlp(std::span<const std::size_t> dims);

Matrix forward_logits(const MlpModel& model, const Matrix& batch);

/// Row-wise softmax probabilities of the model on `batch` [n x d] -> [n x m].
Matrix forward(const MlpModel& model, const Matrix& batch);

/// Numerically stable softmax (per-row max subtraction).
Matrix softmax_rows(const Matrix& logits);

/// Index of the largest entry per row; ties go to the lowest index.
std::vector<int> argmax_rows(const Matrix& probs);

/// Highest-probability class other than `label`; lowest index wins ties.
std::size_t runner_up_class(std::span<const double> probs, std::size_t label);

/// f_y - max_{i != y} f_i per row, in [-1, 1].
std::vector<double> signed_margin(const Matrix& probs, std::span<const int> labels);

/// max(signed margin, 0) per row, in [0, 1].
std::vector<double> margin_confidence(const Matrix& probs, std::span<const int> labels);

/// Loss selector for the gradient routines. All losses are summed over rows.
struct LossKind {
    enum class Kind { cross_entropy, margin, kl_to_reference };

    Kind kind = Kind::cross_entropy;
    /// Target distribution for kl_to_reference: [n x m] or a single [1 x m]
    /// row broadcast to every example.
    Matrix reference;

    static LossKind cross_entropy() { return {Kind::cross_entropy, {}}; }
    /// Clipped marginal confidence max(f_y - max_{i != y} f_i, 0).
    static LossKind margin() { return {Kind::margin, {}}; }
    /// KL(reference || model output).
    static LossKind kl_to_reference(Matrix reference) {
        return {Kind::kl_to_reference, std::move(reference)};
    }
};

struct LayerGradient {
    Matrix weight;
    std::vector<double> bias;
};

struct GradientResult {
    double loss_value = 0.0;
    Matrix input_grad;
    std::optional<std::vector<LayerGradient>> param_grads;
};

/// Summed loss over the batch and its gradient with respect to the inputs.
GradientResult loss_and_input_grad(const MlpModel& model, const Matrix& batch,
                                   std::span<const int> labels, const LossKind& loss);

/// As loss_and_input_grad, additionally filling param_grads for every layer.
GradientResult loss_and_param_grads(const MlpModel& model, const Matrix& batch,
                                    std::span<const int> labels, const LossKind& loss);

/// Per-row loss values (no gradient); same definitions as the gradient routines.
std::vector<double> loss_values(const MlpModel& model, const Matrix& batch,
                                std::span<const int> labels, const LossKind& loss);

// Checkpoint IO: {"format":"advfront-model-v1", ...}. Loading validates the model.
std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& text);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace advfront
