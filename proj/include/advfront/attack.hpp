#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advfront/matrix.hpp"
#include "advfront/nnet.hpp"
#include "advfront/transforms.hpp"

namespace advfront {

enum class NormKind { l2, linf };
enum class StepSchedule { fixed, halving };

NormKind parse_norm(const std::string& text);
const char* to_string(NormKind norm);
StepSchedule parse_schedule(const std::string& text);
const char* to_string(StepSchedule schedule);

struct AttackConfig {
    NormKind norm = NormKind::l2;
    double epsilon = 0.0;
    std::size_t steps = 20;
    double step_size = 0.0;
    std::size_t restarts = 1;
    StepSchedule schedule = StepSchedule::fixed;
    std::uint64_t seed = 0;
    // Frontier sweeps only: also attack level i from the level i-1 best
    // perturbation and keep the lower margin. Off by default so that the
    // level-N result is exactly the full-budget attack.
    bool warm_start_levels = false;

    /// Throws ConfigError unless epsilon >= 0, steps >= 1, step_size > 0
    /// and restarts >= 1.
    void validate() const;
};

/// Step size 2.5 * epsilon / steps, the default when none is given.
double default_step_size(double epsilon, std::size_t steps);

struct AttackOutcome {
    Matrix delta;
    std::vector<double> final_signed_margin;  // best iterate per row
    std::vector<double> last_iterate_margin;  // margin of the final step of the last restart
    std::size_t iterations_used = 0;
};

double row_norm(std::span<const double> row, NormKind norm);
void project_row(std::span<double> row, NormKind norm, double epsilon);

/// Projects every row of `delta` onto the epsilon-ball of `norm`. Rows
/// already inside the ball are returned unchanged.
Matrix project(const Matrix& delta, NormKind norm, double epsilon);

/// Step size at `step_index`: `base_step` halved at 50%, 75% and 87.5% of
/// the step budget.
double halving_schedule(std::size_t step_index, std::size_t steps, double base_step);

/// Margin-minimising PGD on the classifier `model o transform`.
///
/// Each row is attacked independently with its own RNG stream derived from
/// `config.seed` and `stream_offset + row`. The first restart starts from
/// `warm_start` (or zero), later restarts from a uniform point in the ball.
/// The step follows the descent direction of the clipped marginal
/// confidence; x + delta is clipped to [0,1]^d and delta re-projected after
/// every step. Returns the lowest-margin iterate seen, not the last one.
AttackOutcome pgd_margin_attack(const MlpModel& model, const Matrix& batch, std::span<const int> labels,
                                const AttackConfig& config,
                                const InputTransform& transform = InputTransform::identity(),
                                const Matrix* warm_start = nullptr, std::size_t stream_offset = 0);

/// TRADES-style inner maximisation of KL(reference || f(x')) inside the
/// ball, starting from a small random perturbation. Returns x' (not delta).
Matrix pgd_kl_attack(const MlpModel& model, const Matrix& batch, const Matrix& reference_probs,
                     const AttackConfig& config, std::size_t stream_offset = 0);

/// Signed margins of `model o transform` on clip(batch + delta).
std::vector<double> perturbed_signed_margin(const MlpModel& model, const Matrix& batch, const Matrix& delta,
                                            std::span<const int> labels, const InputTransform& transform);

}  // namespace advfront
