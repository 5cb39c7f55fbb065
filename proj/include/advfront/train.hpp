#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "advfront/attack.hpp"
#include "advfront/data.hpp"
#include "advfront/nnet.hpp"

namespace advfront {

enum class TrainMode { standard, trades_fixed, ah_ascending };
/// Objective the inner attack optimises when generating training adversaries.
enum class InnerObjective { margin, kl };

TrainMode parse_train_mode(const std::string& text);
const char* to_string(TrainMode mode);
InnerObjective parse_inner_objective(const std::string& text);
const char* to_string(InnerObjective objective);

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 128;
    double learning_rate = 0.1;
    double momentum = 0.9;
    double beta = 6.0;
    TrainMode mode = TrainMode::standard;
    InnerObjective inner = InnerObjective::margin;
    /// Adversary settings; attack.epsilon is the final training budget.
    AttackConfig attack;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainLogEntry {
    std::size_t epoch = 0;
    double epsilon_t = 0.0;
    double clean_loss = 0.0;   // mean cross-entropy on clean inputs
    double robust_loss = 0.0;  // mean KL(f(x) || f(x')); 0 in standard mode
    double clean_acc = 0.0;    // fraction of training rows classified correctly this epoch
    std::optional<double> robust_acc_probe;  // fraction of adversaries still classified correctly
};

struct TrainResult {
    MlpModel model;
    std::vector<TrainLogEntry> log;
};

/// Per-epoch perturbation budget: t * epsilon / T in ah_ascending mode,
/// epsilon in trades_fixed mode, 0 in standard mode. `epoch` is 1-based.
double epoch_epsilon(const TrainConfig& config, std::size_t epoch);

/// Trains `model` on `dataset`.
///
/// Every epoch reshuffles the data with a seed-derived stream. In the
/// adversarial modes each mini-batch first generates x' with K steps of
/// margin PGD inside B(x, epsilon_t) (or KL-maximising PGD when
/// `inner == kl`) and then minimises
///     CE(f(x), y) + beta * KL(f(x) || f(x'))
/// with f(x) held fixed inside the KL term. Gradients are averaged over
/// the batch and applied with momentum SGD.
TrainResult train(MlpModel model, const LabeledDataset& dataset, const TrainConfig& config);

/// Momentum SGD state: velocity buffers matching the model's parameters.
class SgdOptimizer {
public:
    SgdOptimizer(double learning_rate, double momentum);

    /// v <- momentum * v + g;  theta <- theta - lr * v.
    void step(MlpModel& model, const std::vector<LayerGradient>& grads);

private:
    double learning_rate_;
    double momentum_;
    std::vector<LayerGradient> velocity_;
};

/// One momentum SGD update using (and updating) `velocity`. An empty
/// velocity is initialised to zero.
void sgd_step(MlpModel& model, const std::vector<LayerGradient>& grads, double learning_rate, double momentum,
              std::vector<LayerGradient>& velocity);

/// Training log CSV: `epoch,epsilon_t,clean_loss,robust_loss,clean_acc`.
void write_train_log_csv(const std::vector<TrainLogEntry>& log, std::ostream& out);

}  // namespace advfront
