#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "advfront/attack.hpp"
#include "advfront/data.hpp"
#include "advfront/nnet.hpp"
#include "advfront/transforms.hpp"

namespace advfront {

/// One sample of the adversarial frontier: worst-case clipped margin found
/// within the ball of radius level_index * epsilon / n_levels.
struct FrontierPoint {
    std::size_t level_index = 0;
    double level_fraction = 0.0;
    double epsilon_abs = 0.0;
    double confidence = 0.0;      // after the monotone envelope
    double raw_confidence = 0.0;  // clip(signed_margin, 0, 1) before the envelope
    double signed_margin = 0.0;   // best margin the attack found at this level
};

struct AdversarialFrontier {
    std::size_t example_id = 0;
    std::size_t n_levels = 0;
    double epsilon = 0.0;
    std::vector<FrontierPoint> points;
    std::optional<std::size_t> truncated_at;
    /// The clean input is already misclassified; the frontier is the
    /// degenerate {(0, 0)} and is left out of AH aggregation.
    bool clean_misclassified = false;
};

/// Traces the frontier of one example over levels 0..n_levels.
///
/// Level 0 records the clean margin. Level i attacks with budget
/// i * epsilon / n_levels (step size scaled by the same fraction) from a
/// cold start; with `attack.warm_start_levels` it also tries the previous
/// level's best perturbation and keeps the lower margin. The first level whose best
/// signed margin is negative is recorded with confidence 0 and ends the
/// trace. `attack.epsilon` is ignored; `example_id` selects the RNG stream.
AdversarialFrontier trace_frontier(const MlpModel& model, std::span<const double> x, int label, double epsilon,
                                   std::size_t n_levels, const AttackConfig& attack,
                                   const InputTransform& transform = InputTransform::identity(),
                                   std::size_t example_id = 0);

/// trace_frontier for every row of `dataset`, sharded across `workers`
/// threads. Output order and bytes do not depend on the worker count.
std::vector<AdversarialFrontier> trace_frontiers(const MlpModel& model, const LabeledDataset& dataset,
                                                 double epsilon, std::size_t n_levels, const AttackConfig& attack,
                                                 const InputTransform& transform = InputTransform::identity(),
                                                 std::size_t workers = 1);

/// Running minimum of the confidences.
std::vector<FrontierPoint> monotone_envelope(std::vector<FrontierPoint> points);

/// sign+(F(z)) at a level: 1 when the confidence there is strictly
/// positive, 0 otherwise (including every level past truncation).
int adversarial_accuracy_at(const AdversarialFrontier& frontier, std::size_t level_index);

/// Fraction of frontiers with adversarial accuracy 1 at `level_index`.
double adversarial_accuracy(std::span<const AdversarialFrontier> frontiers, std::size_t level_index);

/// Frontier CSV: `example_id,level_index,level_fraction,epsilon,confidence,truncated`.
void write_frontier_csv(std::span<const AdversarialFrontier> frontiers, std::ostream& out);

/// Mean post-envelope confidence per level over non-excluded frontiers;
/// levels past truncation count as 0. Returns n_levels + 1 values.
std::vector<double> mean_confidence_by_level(std::span<const AdversarialFrontier> frontiers, std::size_t n_levels);

}  // namespace advfront
