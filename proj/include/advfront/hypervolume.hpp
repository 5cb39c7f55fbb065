#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "advfront/attack.hpp"
#include "advfront/data.hpp"
#include "advfront/frontier.hpp"
#include "advfront/nnet.hpp"
#include "advfront/transforms.hpp"

namespace advfront {

struct HvConfig {
    double reference_x = 0.0;
    double reference_y = 0.0;
    std::size_t n_levels = 10;
};

struct AhResult {
    double ah = 0.0;
    std::vector<double> per_interval_areas;
    bool excluded = false;
};

/// Two-objective hypervolume of a frontier whose x-axis is the level
/// fraction i/N: the measure of the union of boxes [r, (x_i, y_i)].
///
/// For the default reference (0,0) this is the right-endpoint rectangle sum
/// sum_i (1/N) * confidence(i+1). Truncated frontiers contribute nothing
/// past truncation. Clean-misclassified frontiers give AH 0 with the
/// excluded flag set. Throws ContractError for unordered, non-monotone or
/// out-of-range input; apply monotone_envelope first.
AhResult hypervolume_2d(const AdversarialFrontier& frontier, const HvConfig& config);

/// Upper bound epsilon^2 * l0 / N on the rectangle-rule error.
double error_bound(double epsilon, std::size_t n_levels, double l0);

struct ConvergenceSample {
    std::size_t n_levels = 0;
    double ah = 0.0;              // mean AH over included examples (level-fraction axis)
    double observed_error = 0.0;  // epsilon * (ah(n_proxy) - ah(N)), raw-epsilon units
};

struct ConvergenceFit {
    double epsilon = 0.0;
    std::size_t n_proxy = 0;
    std::vector<ConvergenceSample> samples;  // one per requested N, then the proxy itself
    double l0_fit = 0.0;
    std::vector<double> bound_curve;  // error_bound(epsilon, N, l0_fit) per sample
};

/// Closed-form least squares fit of e_N ~ epsilon^2 * L0 / N, clamped at 0.
double fit_l0(std::span<const ConvergenceSample> samples, double epsilon);

/// Least squares slope of log(observed_error) against log(N) over samples
/// with a positive error. NaN when fewer than two such samples exist.
double loglog_slope(std::span<const ConvergenceSample> samples);

/// Runs the convergence experiment on a model: traces every example at each
/// N in `n_values` and at `n_proxy`, treating AH(n_proxy) as the truth.
ConvergenceFit convergence_experiment(const MlpModel& model, const LabeledDataset& dataset, double epsilon,
                                      std::size_t n_proxy, std::span<const std::size_t> n_values,
                                      const AttackConfig& attack,
                                      const InputTransform& transform = InputTransform::identity(),
                                      std::size_t workers = 1);

/// Frontier obtained by sampling a known curve F on level fractions i/N,
/// truncating at the first negative value. Bypasses the attack.
AdversarialFrontier frontier_from_curve(const std::function<double(double)>& curve, double epsilon,
                                        std::size_t n_levels);

/// Convergence experiment on a known curve F(z/epsilon) (z in [0, epsilon]).
ConvergenceFit convergence_from_curve(const std::function<double(double)>& curve, double epsilon,
                                      std::size_t n_proxy, std::span<const std::size_t> n_values);

struct AhAggregate {
    double ah_mean = 0.0;
    double ah_std = 0.0;  // population standard deviation
    std::size_t count_included = 0;
    std::size_t count_excluded = 0;
    bool all_excluded = false;
};

AhAggregate aggregate(std::span<const AhResult> results);

}  // namespace advfront
