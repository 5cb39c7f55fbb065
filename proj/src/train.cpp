#include "advfront/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "advfront/error.hpp"

namespace advfront {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::size_t a, std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void accumulate(std::vector<LayerGradient>& into, const std::vector<LayerGradient>& add, double scale) {
    for (std::size_t l = 0; l < into.size(); ++l) {
        auto& w = into[l].weight.data();
        const auto& aw = add[l].weight.data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] += scale * aw[i];
        }
        for (std::size_t i = 0; i < into[l].bias.size(); ++i) {
            into[l].bias[i] += scale * add[l].bias[i];
        }
    }
}

void scale_grads(std::vector<LayerGradient>& grads, double scale) {
    for (auto& g : grads) {
        for (double& v : g.weight.data()) {
            v *= scale;
        }
        for (double& v : g.bias) {
            v *= scale;
        }
    }
}

bool grads_finite(const std::vector<LayerGradient>& grads) {
    return std::ranges::all_of(grads, [](const LayerGradient& g) {
        return g.weight.all_finite() && std::ranges::all_of(g.bias, [](double v) { return std::isfinite(v); });
    });
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TrainMode parse_train_mode(const std::string& text) {
    if (text == "standard") {
        return TrainMode::standard;
    }
    if (text == "trades_fixed") {
        return TrainMode::trades_fixed;
    }
    if (text == "ah_ascending") {
        return TrainMode::ah_ascending;
    }
    throw ConfigError("--mode: expected standard|trades_fixed|ah_ascending, got '" + text + "'");
}

const char* to_string(TrainMode mode) {
    switch (mode) {
        case TrainMode::standard: return "standard";
        case TrainMode::trades_fixed: return "trades_fixed";
        case TrainMode::ah_ascending: return "ah_ascending";
    }
    return "standard";
}

InnerObjective parse_inner_objective(const std::string& text) {
    if (text == "margin") {
        return InnerObjective::margin;
    }
    if (text == "kl") {
        return InnerObjective::kl;
    }
    throw ConfigError("--inner: expected margin|kl, got '" + text + "'");
}

const char* to_string(InnerObjective objective) {
    return objective == InnerObjective::margin ? "margin" : "kl";
}

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw ConfigError("--epochs: must be >= 1");
    }
    if (batch_size < 1) {
        throw ConfigError("--batch-size: must be >= 1");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("--lr: must be > 0");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ConfigError("--momentum: must lie in [0, 1)");
    }
    if (!(beta >= 0.0)) {
        throw ConfigError("--beta: must be >= 0");
    }
    if (mode != TrainMode::standard) {
        attack.validate();
    }
}

double epoch_epsilon(const TrainConfig& config, std::size_t epoch) {
    switch (config.mode) {
        case TrainMode::standard:
            return 0.0;
        case TrainMode::trades_fixed:
            return config.attack.epsilon;
        case TrainMode::ah_ascending:
            return static_cast<double>(epoch) * config.attack.epsilon / static_cast<double>(config.epochs);
    }
    return 0.0;
}

SgdOptimizer::SgdOptimizer(double learning_rate, double momentum)
    : learning_rate_(learning_rate), momentum_(momentum) {}

void SgdOptimizer::step(MlpModel& model, const std::vector<LayerGradient>& grads) {
    sgd_step(model, grads, learning_rate_, momentum_, velocity_);
}

void sgd_step(MlpModel& model, const std::vector<LayerGradient>& grads, double learning_rate, double momentum,
              std::vector<LayerGradient>& velocity) {
    if (grads.size() != model.layers.size()) {
        throw ShapeError("gradient layer count does not match model");
    }
    if (velocity.empty()) {
        for (const auto& layer : model.layers) {
            velocity.push_back({Matrix(layer.out(), layer.in()), std::vector<double>(layer.out(), 0.0)});
        }
    }
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        const auto& g = grads[l];
        if (g.weight.rows() != layer.out() || g.weight.cols() != layer.in() || g.bias.size() != layer.out()) {
            throw ShapeError("gradient shape does not match layer " + std::to_string(l));
        }
        auto& vw = velocity[l].weight.data();
        auto& w = layer.weight.data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            vw[i] = momentum * vw[i] + g.weight.data()[i];
            w[i] -= learning_rate * vw[i];
        }
        auto& vb = velocity[l].bias;
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            vb[i] = momentum * vb[i] + g.bias[i];
            layer.bias[i] -= learning_rate * vb[i];
        }
    }
}

TrainResult train(MlpModel model, const LabeledDataset& dataset, const TrainConfig& config) {
    config.validate();
    model.validate();
    if (dataset.size() == 0) {
        throw InputError("training needs a non-empty dataset");
    }
    if (dataset.dim() != model.input_dim()) {
        throw ShapeError("dataset dimension " + std::to_string(dataset.dim()) + " does not match model input " +
                         std::to_string(model.input_dim()));
    }
    for (int y : dataset.labels) {
        if (static_cast<std::size_t>(y) >= model.num_classes) {
            throw InputError("dataset label " + std::to_string(y) + " exceeds model classes");
        }
    }

    TrainResult result;
    SgdOptimizer optimizer(config.learning_rate, config.momentum);
    std::vector<std::size_t> order(dataset.size());
    const bool adversarial = config.mode != TrainMode::standard && config.beta > 0.0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 shuffle_rng(derive_seed(config.seed, epoch, 0));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        TrainLogEntry entry;
        entry.epoch = epoch;
        entry.epsilon_t = epoch_epsilon(config, epoch);
        std::size_t correct = 0;
        std::size_t robust_correct = 0;

        for (std::size_t start = 0, batch = 0; start < order.size(); start += config.batch_size, ++batch) {
            const std::size_t count = std::min(config.batch_size, order.size() - start);
            const std::span<const std::size_t> idx(order.data() + start, count);
            const Matrix x = dataset.features.gather_rows(idx);
            std::vector<int> y(count);
            for (std::size_t i = 0; i < count; ++i) {
                y[i] = dataset.labels[idx[i]];
            }

            const Matrix clean_probs = forward(model, x);
            const auto predicted = argmax_rows(clean_probs);
            for (std::size_t i = 0; i < count; ++i) {
                correct += static_cast<std::size_t>(predicted[i] == y[i]);
            }

            auto clean = loss_and_param_grads(model, x, y, LossKind::cross_entropy());
            entry.clean_loss += clean.loss_value;
            auto grads = std::move(*clean.param_grads);

            if (adversarial && entry.epsilon_t > 0.0) {
                AttackConfig cfg = config.attack;
                cfg.epsilon = entry.epsilon_t;
                cfg.seed = derive_seed(config.seed, epoch, batch + 1);
                Matrix x_adv;
                if (config.inner == InnerObjective::margin) {
                    const auto outcome = pgd_margin_attack(model, x, y, cfg);
                    x_adv = x;
                    for (std::size_t i = 0; i < x_adv.size(); ++i) {
                        x_adv.data()[i] = std::clamp(x.data()[i] + outcome.delta.data()[i], 0.0, 1.0);
                    }
                } else {
                    x_adv = pgd_kl_attack(model, x, clean_probs, cfg);
                }
                const auto adv_pred = argmax_rows(forward(model, x_adv));
                for (std::size_t i = 0; i < count; ++i) {
                    robust_correct += static_cast<std::size_t>(adv_pred[i] == y[i]);
                }
                auto robust = loss_and_param_grads(model, x_adv, {}, LossKind::kl_to_reference(clean_probs));
                entry.robust_loss += robust.loss_value;
                accumulate(grads, *robust.param_grads, config.beta);
            }

            scale_grads(grads, 1.0 / static_cast<double>(count));
            if (!grads_finite(grads) || !std::isfinite(entry.clean_loss) || !std::isfinite(entry.robust_loss)) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch));
            }
            optimizer.step(model, grads);
        }

        const auto n = static_cast<double>(dataset.size());
        entry.clean_loss /= n;
        entry.robust_loss /= n;
        entry.clean_acc = static_cast<double>(correct) / n;
        if (adversarial && entry.epsilon_t > 0.0) {
            entry.robust_acc_probe = static_cast<double>(robust_correct) / n;
        }
        result.log.push_back(entry);
    }

    model.meta["seed"] = std::to_string(config.seed);
    model.meta["epochs"] = std::to_string(config.epochs);
    model.meta["training_mode"] = to_string(config.mode);
    model.meta["inner_objective"] = to_string(config.inner);
    model.meta["beta"] = format_double(config.beta);
    model.meta["learning_rate"] = format_double(config.learning_rate);
    model.meta["momentum"] = format_double(config.momentum);
    model.meta["batch_size"] = std::to_string(config.batch_size);
    if (config.mode != TrainMode::standard) {
        model.meta["train_epsilon"] = format_double(config.attack.epsilon);
        model.meta["train_norm"] = to_string(config.attack.norm);
        model.meta["attack_steps"] = std::to_string(config.attack.steps);
        model.meta["attack_step_size"] = format_double(config.attack.step_size);
    }
    result.model = std::move(model);
    return result;
}

void write_train_log_csv(const std::vector<TrainLogEntry>& log, std::ostream& out) {
    out << "epoch,epsilon_t,clean_loss,robust_loss,clean_acc\n";
    char buf[160];
    for (const auto& e : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g\n", e.epoch, e.epsilon_t, e.clean_loss,
                      e.robust_loss, e.clean_acc);
        out << buf;
    }
}

}  // namespace advfront
