#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advfront/attack.hpp"
#include "advfront/data.hpp"
#include "advfront/frontier.hpp"
#include "advfront/hypervolume.hpp"
#include "advfront/nnet.hpp"
#include "advfront/transforms.hpp"

namespace advfront {

struct EvaluationOptions {
    double epsilon = 0.5;
    std::size_t n_levels = 10;
    AttackConfig attack;  // epsilon is overwritten with `epsilon`
    InputTransform transform;
    std::size_t workers = 1;
};

/// Clean accuracy, full-budget robust accuracy and AH statistics of one
/// model on one dataset.
struct EvaluationReport {
    double clean_accuracy = 0.0;   // percent
    double robust_accuracy = 0.0;  // percent, adversarial accuracy at level N
    AhAggregate ah;
    std::vector<AdversarialFrontier> frontiers;
    std::vector<AhResult> per_example;
    std::vector<double> mean_confidence;  // per level, for plot data
};

EvaluationReport evaluate_model(const MlpModel& model, const LabeledDataset& dataset,
                                const EvaluationOptions& options);

/// Percentage of rows where argmax f(T(x)) equals the label.
double clean_accuracy(const MlpModel& model, const LabeledDataset& dataset, const InputTransform& transform);

}  // namespace advfront
