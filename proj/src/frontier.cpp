#include "advfront/frontier.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "advfront/error.hpp"
#include "advfront/parallel.hpp"

namespace advfront {

namespace {

FrontierPoint make_point(std::size_t level, std::size_t n_levels, double epsilon, double margin) {
    FrontierPoint p;
    p.level_index = level;
    p.level_fraction = static_cast<double>(level) / static_cast<double>(n_levels);
    p.epsilon_abs = static_cast<double>(level) * epsilon / static_cast<double>(n_levels);
    p.signed_margin = margin;
    p.raw_confidence = std::clamp(margin, 0.0, 1.0);
    p.confidence = p.raw_confidence;
    return p;
}

}  // namespace

AdversarialFrontier trace_frontier(const MlpModel& model, std::span<const double> x, int label, double epsilon,
                                   std::size_t n_levels, const AttackConfig& attack,
                                   const InputTransform& transform, std::size_t example_id) {
    if (n_levels < 1) {
        throw ConfigError("--levels: need at least one level");
    }
    if (!(epsilon > 0.0)) {
        throw ConfigError("--eps: frontier budget must be > 0");
    }
    AdversarialFrontier frontier;
    frontier.example_id = example_id;
    frontier.n_levels = n_levels;
    frontier.epsilon = epsilon;

    const Matrix clean = row_matrix(x);
    const std::vector<int> labels{label};
    const Matrix clean_probs = forward(model, apply(transform, clean));
    const double clean_margin = signed_margin(clean_probs, labels)[0];
    if (argmax_rows(clean_probs)[0] != label || clean_margin < 0.0) {
        frontier.clean_misclassified = true;
        frontier.truncated_at = 0;
        frontier.points.push_back(make_point(0, n_levels, epsilon, std::min(clean_margin, 0.0)));
        frontier.points.back().confidence = 0.0;
        frontier.points.back().raw_confidence = 0.0;
        return frontier;
    }
    frontier.points.push_back(make_point(0, n_levels, epsilon, clean_margin));

    Matrix previous(1, x.size());
    for (std::size_t level = 1; level <= n_levels; ++level) {
        const double fraction = static_cast<double>(level) / static_cast<double>(n_levels);
        AttackConfig cfg = attack;
        cfg.epsilon = epsilon * fraction;
        cfg.step_size = attack.step_size * fraction;

        auto best = pgd_margin_attack(model, clean, labels, cfg, transform, nullptr, example_id);
        if (attack.warm_start_levels && level > 1) {
            auto warm = pgd_margin_attack(model, clean, labels, cfg, transform, &previous, example_id);
            if (warm.final_signed_margin[0] < best.final_signed_margin[0]) {
                best = std::move(warm);
            }
        }
        const double margin = best.final_signed_margin[0];
        previous = best.delta;
        frontier.points.push_back(make_point(level, n_levels, epsilon, margin));
        if (margin < 0.0) {
            frontier.truncated_at = level;
            break;
        }
    }
    frontier.points = monotone_envelope(std::move(frontier.points));
    return frontier;
}

std::vector<AdversarialFrontier> trace_frontiers(const MlpModel& model, const LabeledDataset& dataset,
                                                 double epsilon, std::size_t n_levels, const AttackConfig& attack,
                                                 const InputTransform& transform, std::size_t workers) {
    if (dataset.dim() != model.input_dim() && dataset.size() > 0) {
        throw ShapeError("dataset dimension " + std::to_string(dataset.dim()) + " does not match model input " +
                         std::to_string(model.input_dim()));
    }
    std::vector<AdversarialFrontier> out(dataset.size());
    parallel_for(dataset.size(), workers, [&](std::size_t i) {
        out[i] = trace_frontier(model, dataset.features.row(i), dataset.labels[i], epsilon, n_levels, attack,
                                transform, i);
    });
    return out;
}

std::vector<FrontierPoint> monotone_envelope(std::vector<FrontierPoint> points) {
    for (std::size_t i = 1; i < points.size(); ++i) {
        points[i].confidence = std::min(points[i].confidence, points[i - 1].confidence);
    }
    return points;
}

int adversarial_accuracy_at(const AdversarialFrontier& frontier, std::size_t level_index) {
    if (frontier.clean_misclassified || level_index >= frontier.points.size()) {
        return 0;
    }
    if (frontier.truncated_at && level_index >= *frontier.truncated_at) {
        return 0;
    }
    return frontier.points[level_index].confidence > 0.0 ? 1 : 0;
}

double adversarial_accuracy(std::span<const AdversarialFrontier> frontiers, std::size_t level_index) {
    if (frontiers.empty()) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (const auto& f : frontiers) {
        hits += static_cast<std::size_t>(adversarial_accuracy_at(f, level_index));
    }
    return static_cast<double>(hits) / static_cast<double>(frontiers.size());
}

void write_frontier_csv(std::span<const AdversarialFrontier> frontiers, std::ostream& out) {
    out << "example_id,level_index,level_fraction,epsilon,confidence,truncated\n";
    char buf[160];
    for (const auto& f : frontiers) {
        for (const auto& p : f.points) {
            const bool truncated = f.truncated_at && p.level_index == *f.truncated_at;
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.10g,%.10g,%.10g,%d\n", f.example_id, p.level_index,
                          p.level_fraction, p.epsilon_abs, p.confidence, truncated ? 1 : 0);
            out << buf;
        }
    }
}

std::vector<double> mean_confidence_by_level(std::span<const AdversarialFrontier> frontiers, std::size_t n_levels) {
    std::vector<double> sum(n_levels + 1, 0.0);
    std::size_t count = 0;
    for (const auto& f : frontiers) {
        if (f.clean_misclassified) {
            continue;
        }
        ++count;
        for (const auto& p : f.points) {
            if (p.level_index <= n_levels) {
                sum[p.level_index] += p.confidence;
            }
        }
    }
    if (count > 0) {
        for (double& v : sum) {
            v /= static_cast<double>(count);
        }
    }
    return sum;
}

}  // namespace advfront
