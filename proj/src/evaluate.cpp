#include "advfront/evaluate.hpp"

#include "advfront/error.hpp"

namespace advfront {

double clean_accuracy(const MlpModel& model, const LabeledDataset& dataset, const InputTransform& transform) {
    if (dataset.size() == 0) {
        return 0.0;
    }
    const auto predicted = argmax_rows(forward(model, apply(transform, dataset.features)));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        correct += static_cast<std::size_t>(predicted[i] == dataset.labels[i]);
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(dataset.size());
}

EvaluationReport evaluate_model(const MlpModel& model, const LabeledDataset& dataset,
                                const EvaluationOptions& options) {
    if (dataset.size() == 0) {
        throw InputError("evaluation needs a non-empty dataset");
    }
    AttackConfig attack = options.attack;
    attack.epsilon = options.epsilon;
    attack.validate();
    options.transform.validate(dataset.dim());

    EvaluationReport report;
    report.clean_accuracy = clean_accuracy(model, dataset, options.transform);
    report.frontiers = trace_frontiers(model, dataset, options.epsilon, options.n_levels, attack,
                                       options.transform, options.workers);
    report.robust_accuracy = 100.0 * adversarial_accuracy(report.frontiers, options.n_levels);
    const HvConfig hv{0.0, 0.0, options.n_levels};
    for (const auto& f : report.frontiers) {
        report.per_example.push_back(hypervolume_2d(f, hv));
    }
    report.ah = aggregate(report.per_example);
    report.mean_confidence = mean_confidence_by_level(report.frontiers, options.n_levels);
    return report;
}

}  // namespace advfront
