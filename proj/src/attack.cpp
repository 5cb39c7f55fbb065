#include "advfront/attack.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "advfront/error.hpp"

namespace advfront {

namespace {

std::mt19937_64 row_stream(std::uint64_t seed, std::size_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Keeps x + delta inside the unit box, then re-projects onto the ball.
void constrain(std::span<const double> x, std::span<double> delta, NormKind norm, double epsilon) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        delta[k] = std::clamp(x[k] + delta[k], 0.0, 1.0) - x[k];
    }
    project_row(delta, norm, epsilon);
}

Matrix perturbed(std::span<const double> x, std::span<const double> delta) {
    Matrix out(1, x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        out(0, k) = std::clamp(x[k] + delta[k], 0.0, 1.0);
    }
    return out;
}

void random_in_ball(std::mt19937_64& rng, std::span<double> delta, NormKind norm, double epsilon) {
    if (norm == NormKind::linf) {
        std::uniform_real_distribution<double> u(-epsilon, epsilon);
        for (double& v : delta) {
            v = u(rng);
        }
        return;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : delta) {
        v = gauss(rng);
    }
    const double n = row_norm(delta, NormKind::l2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double radius = epsilon * std::pow(u(rng), 1.0 / static_cast<double>(delta.size()));
    for (double& v : delta) {
        v = n > 0.0 ? v * radius / n : 0.0;
    }
}

double step_at(const AttackConfig& config, std::size_t k) {
    return config.schedule == StepSchedule::halving ? halving_schedule(k, config.steps, config.step_size)
                                                    : config.step_size;
}

// Moves delta along -grad (descent) or +grad (ascent) by eta.
void take_step(std::span<double> delta, std::span<const double> grad, NormKind norm, double eta, double sign) {
    if (norm == NormKind::linf) {
        for (std::size_t k = 0; k < delta.size(); ++k) {
            const double g = grad[k];
            delta[k] += sign * eta * static_cast<double>((g > 0.0) - (g < 0.0));
        }
        return;
    }
    const double n = row_norm(grad, NormKind::l2);
    if (n == 0.0) {
        return;
    }
    for (std::size_t k = 0; k < delta.size(); ++k) {
        delta[k] += sign * eta * grad[k] / n;
    }
}

struct RowResult {
    std::vector<double> delta;
    double best_margin = 0.0;
    double last_margin = 0.0;
    std::size_t iterations = 0;
};

RowResult attack_row(const MlpModel& model, std::span<const double> x, int label, const AttackConfig& config,
                     const InputTransform& transform, std::span<const double> warm, std::size_t stream,
                     std::size_t example_index) {
    const int labels[1] = {label};
    const std::size_t d = x.size();
    auto margin_of = [&](std::span<const double> delta) {
        const Matrix probs = forward(model, apply(transform, perturbed(x, delta)));
        return signed_margin(probs, labels)[0];
    };

    auto rng = row_stream(config.seed, stream);
    RowResult result;
    std::vector<double> delta(d, 0.0);
    for (std::size_t restart = 0; restart < config.restarts; ++restart) {
        if (restart == 0) {
            if (!warm.empty()) {
                std::ranges::copy(warm, delta.begin());
            } else {
                std::ranges::fill(delta, 0.0);
            }
        } else {
            random_in_ball(rng, delta, config.norm, config.epsilon);
        }
        constrain(x, delta, config.norm, config.epsilon);
        double current = margin_of(delta);
        if (restart == 0 || current < result.best_margin) {
            result.best_margin = current;
            result.delta = delta;
        }
        for (std::size_t k = 0; k < config.steps; ++k) {
            const Matrix adv = apply(transform, perturbed(x, delta));
            const auto grad = loss_and_input_grad(model, adv, labels, LossKind::margin());
            if (!grad.input_grad.all_finite()) {
                throw NumericError("non-finite attack gradient for example " + std::to_string(example_index));
            }
            take_step(delta, grad.input_grad.row(0), config.norm, step_at(config, k), -1.0);
            constrain(x, delta, config.norm, config.epsilon);
            current = margin_of(delta);
            ++result.iterations;
            if (current < result.best_margin) {
                result.best_margin = current;
                result.delta = delta;
            }
        }
        result.last_margin = current;
    }
    return result;
}

}  // namespace

NormKind parse_norm(const std::string& text) {
    if (text == "l2") {
        return NormKind::l2;
    }
    if (text == "linf") {
        return NormKind::linf;
    }
    throw ConfigError("--norm: expected l2|linf, got '" + text + "'");
}

const char* to_string(NormKind norm) {
    return norm == NormKind::l2 ? "l2" : "linf";
}

StepSchedule parse_schedule(const std::string& text) {
    if (text == "fixed") {
        return StepSchedule::fixed;
    }
    if (text == "halving") {
        return StepSchedule::halving;
    }
    throw ConfigError("--schedule: expected fixed|halving, got '" + text + "'");
}

const char* to_string(StepSchedule schedule) {
    return schedule == StepSchedule::fixed ? "fixed" : "halving";
}

void AttackConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("--eps: attack epsilon must be finite and >= 0");
    }
    if (steps < 1) {
        throw ConfigError("--steps: attack needs at least one step");
    }
    if (!(step_size > 0.0) || !std::isfinite(step_size)) {
        throw ConfigError("--step-size: attack step size must be > 0");
    }
    if (restarts < 1) {
        throw ConfigError("--restarts: attack needs at least one restart");
    }
}

double default_step_size(double epsilon, std::size_t steps) {
    return 2.5 * epsilon / static_cast<double>(steps);
}

double row_norm(std::span<const double> row, NormKind norm) {
    double acc = 0.0;
    if (norm == NormKind::linf) {
        for (double v : row) {
            acc = std::max(acc, std::abs(v));
        }
        return acc;
    }
    for (double v : row) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

void project_row(std::span<double> row, NormKind norm, double epsilon) {
    if (epsilon <= 0.0) {
        std::ranges::fill(row, 0.0);
        return;
    }
    if (norm == NormKind::linf) {
        for (double& v : row) {
            v = std::clamp(v, -epsilon, epsilon);
        }
        return;
    }
    const double n = row_norm(row, NormKind::l2);
    if (n <= epsilon) {
        return;
    }
    const double scale = epsilon / n;
    for (double& v : row) {
        v *= scale;
    }
    // Rounding can leave the norm an ulp above epsilon; shrink until inside
    // so a second projection is a no-op.
    const double shrink = std::nextafter(1.0, 0.0);
    while (row_norm(row, NormKind::l2) > epsilon) {
        for (double& v : row) {
            v *= shrink;
        }
    }
}

Matrix project(const Matrix& delta, NormKind norm, double epsilon) {
    Matrix out = delta;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        project_row(out.row(r), norm, epsilon);
    }
    return out;
}

double halving_schedule(std::size_t step_index, std::size_t steps, double base_step) {
    if (step_index >= steps) {
        throw ContractError("halving_schedule: step index " + std::to_string(step_index) + " >= steps " +
                            std::to_string(steps));
    }
    const double t = static_cast<double>(step_index);
    const double k = static_cast<double>(steps);
    double step = base_step;
    for (double boundary : {0.5, 0.75, 0.875}) {
        if (t >= boundary * k) {
            step *= 0.5;
        }
    }
    return step;
}

AttackOutcome pgd_margin_attack(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                                const AttackConfig& config, const InputTransform& transform,
                                const Matrix* warm_start, std::size_t stream_offset) {
    config.validate();
    transform.validate(batch.cols());
    if (labels.size() != batch.rows()) {
        throw ShapeError("label count does not match batch rows");
    }
    if (warm_start != nullptr && (warm_start->rows() != batch.rows() || warm_start->cols() != batch.cols())) {
        throw ShapeError("warm start shape does not match batch");
    }
    AttackOutcome outcome;
    outcome.delta = Matrix(batch.rows(), batch.cols());
    outcome.final_signed_margin.resize(batch.rows());
    outcome.last_iterate_margin.resize(batch.rows());
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        const auto warm = warm_start != nullptr ? warm_start->row(r) : std::span<const double>{};
        auto row = attack_row(model, batch.row(r), labels[r], config, transform, warm, stream_offset + r,
                              stream_offset + r);
        std::ranges::copy(row.delta, outcome.delta.row(r).begin());
        outcome.final_signed_margin[r] = row.best_margin;
        outcome.last_iterate_margin[r] = row.last_margin;
        outcome.iterations_used = std::max(outcome.iterations_used, row.iterations);
    }
    return outcome;
}

Matrix pgd_kl_attack(const MlpModel& model, const Matrix& batch, const Matrix& reference_probs,
                     const AttackConfig& config, std::size_t stream_offset) {
    config.validate();
    Matrix adv(batch.rows(), batch.cols());
    const std::vector<int> no_labels;
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        const auto x = batch.row(r);
        auto rng = row_stream(config.seed, stream_offset + r);
        std::normal_distribution<double> gauss(0.0, 1e-3);
        std::vector<double> delta(x.size());
        for (double& v : delta) {
            v = gauss(rng);
        }
        constrain(x, delta, config.norm, config.epsilon);
        const LossKind kl = LossKind::kl_to_reference(row_matrix(reference_probs.row(r)));
        for (std::size_t k = 0; k < config.steps; ++k) {
            const auto grad = loss_and_input_grad(model, perturbed(x, delta), no_labels, kl);
            if (!grad.input_grad.all_finite()) {
                throw NumericError("non-finite KL attack gradient for example " + std::to_string(stream_offset + r));
            }
            take_step(delta, grad.input_grad.row(0), config.norm, step_at(config, k), +1.0);
            constrain(x, delta, config.norm, config.epsilon);
        }
        std::ranges::copy(perturbed(x, delta).row(0), adv.row(r).begin());
    }
    return adv;
}

std::vector<double> perturbed_signed_margin(const MlpModel& model, const Matrix& batch, const Matrix& delta,
                                            std::span<const int> labels, const InputTransform& transform) {
    if (delta.rows() != batch.rows() || delta.cols() != batch.cols()) {
        throw ShapeError("delta shape does not match batch");
    }
    Matrix adv(batch.rows(), batch.cols());
    for (std::size_t i = 0; i < adv.size(); ++i) {
        adv.data()[i] = std::clamp(batch.data()[i] + delta.data()[i], 0.0, 1.0);
    }
    return signed_margin(forward(model, apply(transform, adv)), labels);
}

}  // namespace advfront
