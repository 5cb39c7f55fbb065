#include "advfront/hypervolume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advfront/error.hpp"

namespace advfront {

AhResult hypervolume_2d(const AdversarialFrontier& frontier, const HvConfig& config) {
    AhResult result;
    if (frontier.clean_misclassified) {
        result.excluded = true;
        return result;
    }
    const std::size_t n = frontier.n_levels != 0 ? frontier.n_levels : config.n_levels;
    if (n == 0 || (frontier.n_levels != 0 && config.n_levels != frontier.n_levels)) {
        throw ContractError("hypervolume: frontier has " + std::to_string(frontier.n_levels) +
                            " levels but config expects " + std::to_string(config.n_levels));
    }
    const auto& pts = frontier.points;
    if (pts.empty() || pts.size() > n + 1) {
        throw ContractError("hypervolume: frontier must hold 1..N+1 points");
    }
    double min_conf = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (p.level_index != i) {
            throw ContractError("hypervolume: frontier points are not ordered by level");
        }
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
            throw ContractError("hypervolume: confidence outside [0,1] at level " + std::to_string(i));
        }
        if (i > 0 && p.confidence > pts[i - 1].confidence) {
            throw ContractError("hypervolume: frontier is not non-increasing at level " + std::to_string(i) +
                                "; apply monotone_envelope first");
        }
        min_conf = std::min(min_conf, p.confidence);
    }
    if (config.reference_x > 0.0 || config.reference_y > min_conf) {
        throw ContractError("hypervolume: reference point is not dominated by the frontier");
    }

    const double width = 1.0 / static_cast<double>(n);
    if (config.reference_x < 0.0) {
        result.per_interval_areas.push_back(-config.reference_x * (pts.front().confidence - config.reference_y));
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
        result.per_interval_areas.push_back(width * (pts[i].confidence - config.reference_y));
    }
    for (double a : result.per_interval_areas) {
        result.ah += a;
    }
    return result;
}

double error_bound(double epsilon, std::size_t n_levels, double l0) {
    if (n_levels == 0) {
        throw ConfigError("error_bound: N must be >= 1");
    }
    return epsilon * epsilon * l0 / static_cast<double>(n_levels);
}

double fit_l0(std::span<const ConvergenceSample> samples, double epsilon) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& s : samples) {
        const double basis = epsilon * epsilon / static_cast<double>(s.n_levels);
        num += s.observed_error * basis;
        den += basis * basis;
    }
    if (den <= 0.0) {
        return 0.0;
    }
    return std::max(0.0, num / den);
}

double loglog_slope(std::span<const ConvergenceSample> samples) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : samples) {
        if (s.observed_error > 0.0 && s.n_levels > 0) {
            pts.emplace_back(std::log(static_cast<double>(s.n_levels)), std::log(s.observed_error));
        }
    }
    if (pts.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

namespace {

double mean_ah(std::span<const AdversarialFrontier> frontiers, std::size_t n_levels) {
    std::vector<AhResult> results;
    results.reserve(frontiers.size());
    for (const auto& f : frontiers) {
        results.push_back(hypervolume_2d(f, HvConfig{0.0, 0.0, n_levels}));
    }
    return aggregate(results).ah_mean;
}

void check_levels(std::size_t n_proxy, std::span<const std::size_t> n_values) {
    if (n_values.empty()) {
        throw ConfigError("--n-values: need at least one N");
    }
    for (auto n : n_values) {
        if (n < 1) {
            throw ConfigError("--n-values: every N must be >= 1");
        }
        if (n >= n_proxy) {
            throw ConfigError("--proxy: must exceed every N in --n-values");
        }
    }
}

ConvergenceFit finish(double epsilon, std::size_t n_proxy, double proxy_ah, std::vector<ConvergenceSample> samples) {
    ConvergenceFit fit;
    fit.epsilon = epsilon;
    fit.n_proxy = n_proxy;
    fit.l0_fit = fit_l0(samples, epsilon);
    samples.push_back({n_proxy, proxy_ah, 0.0});
    for (const auto& s : samples) {
        fit.bound_curve.push_back(error_bound(epsilon, s.n_levels, fit.l0_fit));
    }
    fit.samples = std::move(samples);
    return fit;
}

}  // namespace

ConvergenceFit convergence_experiment(const MlpModel& model, const LabeledDataset& dataset, double epsilon,
                                      std::size_t n_proxy, std::span<const std::size_t> n_values,
                                      const AttackConfig& attack, const InputTransform& transform,
                                      std::size_t workers) {
    if (dataset.size() == 0) {
        throw InputError("convergence experiment needs a non-empty dataset");
    }
    check_levels(n_proxy, n_values);
    const auto proxy = trace_frontiers(model, dataset, epsilon, n_proxy, attack, transform, workers);
    const double proxy_ah = mean_ah(proxy, n_proxy);
    std::vector<ConvergenceSample> samples;
    for (auto n : n_values) {
        const auto frontiers = trace_frontiers(model, dataset, epsilon, n, attack, transform, workers);
        const double ah = mean_ah(frontiers, n);
        samples.push_back({n, ah, epsilon * (proxy_ah - ah)});
    }
    return finish(epsilon, n_proxy, proxy_ah, std::move(samples));
}

AdversarialFrontier frontier_from_curve(const std::function<double(double)>& curve, double epsilon,
                                        std::size_t n_levels) {
    if (n_levels < 1) {
        throw ConfigError("frontier_from_curve: N must be >= 1");
    }
    AdversarialFrontier f;
    f.n_levels = n_levels;
    f.epsilon = epsilon;
    for (std::size_t i = 0; i <= n_levels; ++i) {
        FrontierPoint p;
        p.level_index = i;
        p.level_fraction = static_cast<double>(i) / static_cast<double>(n_levels);
        p.epsilon_abs = static_cast<double>(i) * epsilon / static_cast<double>(n_levels);
        p.signed_margin = curve(p.level_fraction);
        p.raw_confidence = std::clamp(p.signed_margin, 0.0, 1.0);
        p.confidence = p.raw_confidence;
        f.points.push_back(p);
        if (p.signed_margin < 0.0) {
            if (i == 0) {
                f.clean_misclassified = true;
            }
            f.truncated_at = i;
            break;
        }
    }
    f.points = monotone_envelope(std::move(f.points));
    return f;
}

ConvergenceFit convergence_from_curve(const std::function<double(double)>& curve, double epsilon,
                                      std::size_t n_proxy, std::span<const std::size_t> n_values) {
    check_levels(n_proxy, n_values);
    const double proxy_ah = hypervolume_2d(frontier_from_curve(curve, epsilon, n_proxy), {0.0, 0.0, n_proxy}).ah;
    std::vector<ConvergenceSample> samples;
    for (auto n : n_values) {
        const double ah = hypervolume_2d(frontier_from_curve(curve, epsilon, n), {0.0, 0.0, n}).ah;
        samples.push_back({n, ah, epsilon * (proxy_ah - ah)});
    }
    return finish(epsilon, n_proxy, proxy_ah, std::move(samples));
}

AhAggregate aggregate(std::span<const AhResult> results) {
    AhAggregate agg;
    double sum = 0.0;
    for (const auto& r : results) {
        if (r.excluded) {
            ++agg.count_excluded;
            continue;
        }
        ++agg.count_included;
        sum += r.ah;
    }
    if (agg.count_included == 0) {
        agg.all_excluded = true;
        return agg;
    }
    agg.ah_mean = sum / static_cast<double>(agg.count_included);
    double sq = 0.0;
    for (const auto& r : results) {
        if (!r.excluded) {
            sq += (r.ah - agg.ah_mean) * (r.ah - agg.ah_mean);
        }
    }
    agg.ah_std = std::sqrt(sq / static_cast<double>(agg.count_included));
    return agg;
}

}  // namespace advfront
