// Acceptance suite: one line per criterion, PASS/FAIL/FINDING.
//
//   advfront_acceptance            run every criterion
//   advfront_acceptance --only N   run criterion N
//
// Exit status is non-zero when any criterion prints FAIL. A FINDING is an
// outcome the criterion itself allows to go either way; it is reported but
// does not fail the run.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "advfront/attack.hpp"
#include "advfront/cli.hpp"
#include "advfront/data.hpp"
#include "advfront/evaluate.hpp"
#include "advfront/frontier.hpp"
#include "advfront/hypervolume.hpp"
#include "advfront/nnet.hpp"
#include "advfront/train.hpp"
#include "oracles.hpp"

using namespace advfront;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets, pinned.
constexpr int kHvFrontiers = 120;
constexpr int kHvGrid = 2000;
constexpr double kHvTol = 2e-3;
constexpr double kHvSeconds = 30.0;

constexpr int kGradModels = 24;
constexpr double kGradStep = 1e-5;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradFloor = 1e-6;  // denominator floor for near-zero derivatives
constexpr double kGradSeconds = 60.0;

constexpr double kConvSlopeLo = -1.3;
constexpr double kConvSlopeHi = -0.7;
constexpr double kConvL0Target = 1.0;
constexpr double kConvL0RelTol = 0.2;
constexpr std::size_t kConvProxy = 128;
constexpr double kConvSeconds = 10.0;

constexpr int kLinInstances = 150;
constexpr double kLinTol = 1e-3;
constexpr double kLinSeconds = 30.0;

constexpr std::size_t kFrontierExamples = 500;
constexpr double kFrontierSeconds = 120.0;

constexpr int kSeeds = 5;
constexpr int kOrderingNeeded = 4;
constexpr double kOrderingSeconds = 300.0;
constexpr int kAscendingNeeded = 3;
constexpr double kAscendingSeconds = 600.0;

constexpr double kTransformRobustMax = 10.0;  // percent; "near zero"
constexpr double kTransformSeconds = 300.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class Verdict { pass, fail, finding };

struct Line {
    Verdict verdict;
    std::string text;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Verdict pass_if(bool ok) {
    return ok ? Verdict::pass : Verdict::fail;
}

AttackConfig make_attack(NormKind norm, double eps, std::size_t steps, std::uint64_t seed) {
    AttackConfig c;
    c.norm = norm;
    c.epsilon = eps;
    c.steps = steps;
    c.step_size = default_step_size(eps, steps);
    c.seed = seed;
    return c;
}

// 1 ------------------------------------------------------------------------

Line hypervolume_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < kHvFrontiers; ++t) {
        const std::size_t n = 3 + rng() % 18;
        AdversarialFrontier f;
        f.n_levels = n;
        f.epsilon = 1.0;
        double c = u(rng);
        for (std::size_t i = 0; i <= n; ++i) {
            FrontierPoint p;
            p.level_index = i;
            p.level_fraction = static_cast<double>(i) / static_cast<double>(n);
            if (i > 0) {
                c = u(rng) < 0.3 ? c : c * u(rng);
            }
            if (i > 0 && u(rng) < 0.04) {
                c = 0.0;
                f.truncated_at = i;
            }
            p.raw_confidence = c;
            p.confidence = c;
            f.points.push_back(p);
            if (f.truncated_at) {
                break;
            }
        }
        const double ah = hypervolume_2d(f, {0.0, 0.0, n}).ah;
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& p : f.points) {
            xs.push_back(p.level_fraction);
            ys.push_back(p.confidence);
        }
        worst = std::max(worst, std::abs(ah - oracle::grid_box_union(xs, ys, kHvGrid)));
    }
    const double secs = seconds_since(t0);
    return {pass_if(worst < kHvTol && secs < kHvSeconds),
            fmt("hypervolume oracle: %d frontiers, max |AH - grid| = %.2e (tol %.0e), %.1f s (limit %.0f s)",
                kHvFrontiers, worst, kHvTol, secs, kHvSeconds)};
}

// 2 ------------------------------------------------------------------------

bool margin_kink(const MlpModel& m, std::span<const double> x, int y) {
    const auto p = oracle::probs(m, {x.begin(), x.end()});
    std::vector<double> others;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (static_cast<int>(i) != y) {
            others.push_back(p[i]);
        }
    }
    std::sort(others.rbegin(), others.rend());
    return std::abs(oracle::margin(p, y)) < 1e-3 || (others.size() > 1 && others[0] - others[1] < 1e-3);
}

Line gradient_correctness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::size_t checks = 0;
    for (int t = 0; t < kGradModels; ++t) {
        const std::size_t layers = 1 + t % 3;
        std::vector<std::size_t> dims{2 + rng() % 31};
        for (std::size_t l = 1; l < layers; ++l) {
            dims.push_back(2 + rng() % 31);
        }
        dims.push_back(2 + rng() % 9);
        const auto model = make_mlp(dims, 1000 + t);
        const std::size_t m = dims.back();
        // Two rows, drawn away from margin kinks so the margin loss is smooth there.
        Matrix x(2, dims.front());
        std::vector<int> y(2);
        // Row 0 takes the predicted label so its margin (and margin gradient) is non-trivial.
        for (std::size_t r = 0; r < 2; ++r) {
            do {
                for (double& v : x.row(r)) {
                    v = u(rng);
                }
                y[r] = r == 0 ? argmax_rows(forward(model, x.slice_rows(0, 1)))[0] : static_cast<int>(rng() % m);
            } while (margin_kink(model, x.row(r), y[r]));
        }
        Matrix ref(2, m);
        for (std::size_t r = 0; r < 2; ++r) {
            double s = 0.0;
            for (double& v : ref.row(r)) {
                v = 0.05 + u(rng);
                s += v;
            }
            for (double& v : ref.row(r)) {
                v /= s;
            }
        }
        for (const auto& kind : {LossKind::cross_entropy(), LossKind::margin(), LossKind::kl_to_reference(ref)}) {
            const std::span<const int> labels =
                kind.kind == LossKind::Kind::kl_to_reference ? std::span<const int>{} : std::span<const int>(y);
            const auto g = loss_and_param_grads(model, x, labels, kind);
            auto total = [&](const MlpModel& mm, const Matrix& b) {
                double s = 0.0;
                for (double v : loss_values(mm, b, labels, kind)) {
                    s += v;
                }
                return s;
            };
            auto record = [&](double analytic, double fd) {
                worst = std::max(worst, std::abs(analytic - fd) / std::max({kGradFloor, std::abs(analytic), std::abs(fd)}));
                ++checks;
            };
            for (std::size_t i = 0; i < x.size(); ++i) {
                Matrix xb = x;
                const double x0 = x.data()[i];
                xb.data()[i] = x0 + kGradStep;
                const double up = total(model, xb);
                xb.data()[i] = x0 - kGradStep;
                record(g.input_grad.data()[i], (up - total(model, xb)) / (2.0 * kGradStep));
            }
            MlpModel mm = model;
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                auto& w = mm.layers[l].weight.data();
                for (std::size_t i = 0; i < w.size(); ++i) {
                    const double w0 = w[i];
                    w[i] = w0 + kGradStep;
                    const double up = total(mm, x);
                    w[i] = w0 - kGradStep;
                    const double down = total(mm, x);
                    w[i] = w0;
                    record((*g.param_grads)[l].weight.data()[i], (up - down) / (2.0 * kGradStep));
                }
                auto& b = mm.layers[l].bias;
                for (std::size_t i = 0; i < b.size(); ++i) {
                    const double b0 = b[i];
                    b[i] = b0 + kGradStep;
                    const double up = total(mm, x);
                    b[i] = b0 - kGradStep;
                    const double down = total(mm, x);
                    b[i] = b0;
                    record((*g.param_grads)[l].bias[i], (up - down) / (2.0 * kGradStep));
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    return {pass_if(worst < kGradRelTol && secs < kGradSeconds),
            fmt("gradient correctness: %d MLPs x 3 losses, %zu derivatives, max rel err %.2e (tol %.0e), "
                "%.1f s (limit %.0f s)",
                kGradModels, checks, worst, kGradRelTol, secs, kGradSeconds)};
}

// 3 ------------------------------------------------------------------------

Line convergence_law() {
    const auto t0 = Clock::now();
    const std::vector<std::size_t> ns{2, 4, 8, 16, 32, 64};
    const auto fit = convergence_from_curve([](double z) { return 1.0 - z; }, 1.0, kConvProxy, ns);
    const double slope = loglog_slope(fit.samples);
    const double secs = seconds_since(t0);
    const bool slope_ok = slope >= kConvSlopeLo && slope <= kConvSlopeHi;
    const double rel = std::abs(fit.l0_fit - kConvL0Target) / kConvL0Target;
    const bool l0_ok = rel <= kConvL0RelTol;
    return {pass_if(slope_ok && l0_ok && secs < kConvSeconds),
            fmt("convergence law: log-log slope %.3f (want [%.1f, %.1f]) %s; L0 fit %.4f vs %.1f, rel dev %.1f%% "
                "(tol %.0f%%) %s; %.2f s (limit %.0f s)",
                slope, kConvSlopeLo, kConvSlopeHi, slope_ok ? "ok" : "out of range", fit.l0_fit, kConvL0Target,
                100.0 * rel, 100.0 * kConvL0RelTol, l0_ok ? "ok" : "out of range", secs, kConvSeconds)};
}

// 4 ------------------------------------------------------------------------

Line linear_optimality() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.3, 0.7);
    double worst = 0.0;
    int positive = 0;
    for (int t = 0; t < kLinInstances; ++t) {
        const std::size_t d = 2 + rng() % 7;
        const std::vector<std::size_t> dims{d, 2};
        auto model = make_zero_mlp(dims);
        for (double& w : model.layers[0].weight.data()) {
            w = 2.0 * g(rng);
        }
        model.layers[0].bias = {0.2 * g(rng), 0.2 * g(rng)};
        Matrix x(1, d);
        for (double& v : x.data()) {
            v = u(rng);
        }
        const int y = argmax_rows(forward(model, x))[0];
        const double eps = 0.05 + 0.2 * (rng() % 1000) / 1000.0;  // <= 0.25, box never binds
        const std::vector<int> labels{y};
        const auto out = pgd_margin_attack(model, x, labels, make_attack(NormKind::l2, eps, 20, t));
        const auto dstar = oracle::linear_optimal_delta(model, y, eps);
        std::vector<double> xs(d);
        for (std::size_t k = 0; k < d; ++k) {
            xs[k] = x(0, k) + dstar[k];
        }
        const double optimum = std::max(0.0, oracle::margin(oracle::probs(model, xs), y));
        positive += optimum > 0.0 ? 1 : 0;
        worst = std::max(worst, std::abs(std::max(0.0, out.final_signed_margin[0]) - optimum));
    }
    const double secs = seconds_since(t0);
    return {pass_if(worst < kLinTol && secs < kLinSeconds),
            fmt("linear-model attack optimality: %d instances (%d with positive optimum), max |MAR_pgd - MAR*| = "
                "%.2e (tol %.0e), %.2f s (limit %.0f s)",
                kLinInstances, positive, worst, kLinTol, secs, kLinSeconds)};
}

// 5 ------------------------------------------------------------------------

Line frontier_contracts() {
    const auto t0 = Clock::now();
    const auto all = gen_blobs(kFrontierExamples / 2, 2, 2, 0.5, 0.12, 55);
    TrainConfig tc;
    tc.epochs = 15;
    tc.batch_size = 64;
    tc.learning_rate = 0.05;
    tc.seed = 55;
    const std::vector<std::size_t> dims{2, 16, 16, 2};
    const auto model = train(make_mlp(dims, 55), all, tc).model;

    const double eps = 0.3;
    const std::size_t n = 10;
    const auto attack = make_attack(NormKind::l2, eps, 20, 55);
    const auto frontiers = trace_frontiers(model, all, eps, n, attack);
    const auto direct = pgd_margin_attack(model, all.features, all.labels, attack);
    const auto clean = argmax_rows(forward(model, all.features));

    std::size_t monotone_bad = 0;
    std::size_t truncation_bad = 0;
    std::size_t disagree = 0;
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& f = frontiers[i];
        for (std::size_t k = 1; k < f.points.size(); ++k) {
            monotone_bad += f.points[k].confidence > f.points[k - 1].confidence ? 1 : 0;
        }
        if (f.truncated_at) {
            ++truncated;
            const std::size_t at = *f.truncated_at;
            if (f.points.size() != at + 1 || f.points[at].confidence != 0.0) {
                ++truncation_bad;
            }
            for (std::size_t level = at; level <= n; ++level) {
                truncation_bad += adversarial_accuracy_at(f, level) != 0 ? 1 : 0;
            }
        }
        const int d = clean[i] == all.labels[i] && direct.final_signed_margin[i] > 0.0 ? 1 : 0;
        disagree += d != adversarial_accuracy_at(f, n) ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    const double robust_frontier = 100.0 * adversarial_accuracy(frontiers, n);

    // Informational: the opt-in warm-started sweep is a stronger attack, so
    // it may break examples the single full-budget attack misses.
    auto warm_attack = attack;
    warm_attack.warm_start_levels = true;
    const auto warm = trace_frontiers(model, all, eps, n, warm_attack);
    std::size_t warm_disagree = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int d = clean[i] == all.labels[i] && direct.final_signed_margin[i] > 0.0 ? 1 : 0;
        warm_disagree += d != adversarial_accuracy_at(warm[i], n) ? 1 : 0;
    }
    return {pass_if(monotone_bad == 0 && truncation_bad == 0 && disagree == 0 && secs < kFrontierSeconds),
            fmt("frontier contracts: %zu examples, %zu truncated; monotonicity violations %zu, truncation "
                "violations %zu, level-N vs direct attack disagreements %zu (robust acc %.1f%%), %.1f s (limit %.0f s); "
                "note: warm-started sweep disagrees on %zu",
                all.size(), truncated, monotone_bad, truncation_bad, disagree, robust_frontier, secs,
                kFrontierSeconds, warm_disagree)};
}

// 6 and 7 ----------------------------------------------------------------------

struct TwoGaussians {
    LabeledDataset train;
    LabeledDataset test;
};

// Centres 0.8 apart with sigma 0.05, so an l2 budget of 0.3 around most
// points still fits on one side of the bisector.
TwoGaussians two_gaussians(std::uint64_t seed) {
    auto all = gen_blobs(200, 2, 2, 0.8, 0.05, seed);
    auto [tr, te] = split(all, 0.3, seed);
    return {std::move(tr), std::move(te)};
}

constexpr double kTrainEps = 0.3;

TrainConfig training_config(TrainMode mode, std::uint64_t seed) {
    TrainConfig c;
    c.epochs = 30;
    c.batch_size = 32;
    c.learning_rate = 0.01;  // 0.05 diverges late in the robust runs once logits are large
    c.momentum = 0.9;
    c.beta = 6.0;
    c.mode = mode;
    c.attack = make_attack(NormKind::l2, kTrainEps, 10, seed);
    c.seed = seed;
    return c;
}

EvaluationReport train_and_evaluate(const TwoGaussians& data, TrainMode mode, std::uint64_t seed) {
    const std::vector<std::size_t> dims{2, 32, 32, 2};
    const auto model = train(make_mlp(dims, seed), data.train, training_config(mode, seed)).model;
    EvaluationOptions opt;
    opt.epsilon = kTrainEps;
    opt.n_levels = 10;
    opt.attack = make_attack(NormKind::l2, kTrainEps, 20, seed + 100);
    return evaluate_model(model, data.test, opt);
}

Line training_ordering() {
    const auto t0 = Clock::now();
    int wins = 0;
    std::string detail;
    for (int s = 0; s < kSeeds; ++s) {
        const auto data = two_gaussians(100 + s);
        const auto standard = train_and_evaluate(data, TrainMode::standard, 100 + s);
        const auto robust = train_and_evaluate(data, TrainMode::ah_ascending, 100 + s);
        const bool win = robust.ah.ah_mean > standard.ah.ah_mean && robust.robust_accuracy > standard.robust_accuracy;
        wins += win ? 1 : 0;
        detail += fmt(" [AH %.3f vs %.3f, RA %.1f%% vs %.1f%%]", robust.ah.ah_mean, standard.ah.ah_mean,
                      robust.robust_accuracy, standard.robust_accuracy);
    }
    const double secs = seconds_since(t0);
    return {pass_if(wins >= kOrderingNeeded && secs < kOrderingSeconds),
            fmt("training ordering (AH-trained vs standard, l2 eps=%.1f): %d/%d seeds better on both AH and robust "
                "accuracy (need %d);%s %.1f s (limit %.0f s)",
                kTrainEps, wins, kSeeds, kOrderingNeeded, detail.c_str(), secs, kOrderingSeconds)};
}

Line ascending_ablation() {
    const auto t0 = Clock::now();
    int wins = 0;
    std::string detail;
    for (int s = 0; s < kSeeds; ++s) {
        const auto data = two_gaussians(200 + s);
        const auto fixed = train_and_evaluate(data, TrainMode::trades_fixed, 200 + s);
        const auto ascending = train_and_evaluate(data, TrainMode::ah_ascending, 200 + s);
        wins += ascending.ah.ah_mean >= fixed.ah.ah_mean ? 1 : 0;
        detail += fmt(" [%.3f vs %.3f]", ascending.ah.ah_mean, fixed.ah.ah_mean);
    }
    const double secs = seconds_since(t0);
    const bool met = wins >= kAscendingNeeded;
    const bool in_time = secs < kAscendingSeconds;
    return {!in_time ? Verdict::fail : (met ? Verdict::pass : Verdict::finding),
            fmt("ascending ablation (AH ascending vs fixed): %d/%d seeds ascending >= fixed (need %d)%s;%s "
                "%.1f s (limit %.0f s)",
                wins, kSeeds, kAscendingNeeded, met ? "" : ", reported as a finding", detail.c_str(), secs,
                kAscendingSeconds)};
}

// 8 ------------------------------------------------------------------------

Line transform_reproduction() {
    const auto t0 = Clock::now();
    // Heavy pixel noise gives the standard model noisy weights, hence
    // high-frequency attack directions that a median filter partly removes.
    auto all = gen_images(150, 2, 8, 0.3, 808);
    auto [train_set, test_set] = split(all, 0.3, 808);
    TrainConfig tc;
    tc.epochs = 40;
    tc.batch_size = 32;
    tc.learning_rate = 0.05;
    tc.seed = 808;
    const std::vector<std::size_t> dims{64, 64, 2};
    const auto model = train(make_mlp(dims, 808), train_set, tc).model;

    EvaluationOptions opt;
    opt.epsilon = 0.5;
    opt.n_levels = 10;
    opt.attack = make_attack(NormKind::linf, opt.epsilon, 20, 809);
    const auto none = evaluate_model(model, test_set, opt);
    opt.transform = InputTransform::median_smooth(3, 8);
    const auto median = evaluate_model(model, test_set, opt);
    const double secs = seconds_since(t0);
    const bool raised = median.ah.ah_mean > none.ah.ah_mean;
    const bool near_zero = median.robust_accuracy <= kTransformRobustMax;
    return {pass_if(raised && near_zero && secs < kTransformSeconds),
            fmt("transform reproduction (8x8 images, linf eps=%.1f): AH none %.4f -> median:3 %.4f (%s); robust acc "
                "none %.1f%%, median %.1f%% (max %.0f%%); clean %.1f%% / %.1f%%; %.1f s (limit %.0f s)",
                opt.epsilon, none.ah.ah_mean, median.ah.ah_mean, raised ? "raised" : "not raised",
                none.robust_accuracy, median.robust_accuracy, kTransformRobustMax, none.clean_accuracy,
                median.clean_accuracy, secs, kTransformSeconds)};
}

// 9 ------------------------------------------------------------------------

std::map<std::string, std::string> payload(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() != "run.json") {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            out[e.path().filename().string()] = s.str();
        }
    }
    return out;
}

Line determinism() {
    const auto t0 = Clock::now();
    const auto root = fs::temp_directory_path() / ("advfront_acceptance_" + std::to_string(::getpid()));
    const std::string r = root.string();
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"gen-data", {"gen-data", "--seed", "9", "--kind", "images", "--n-per-class", "30", "--side", "6", "--out",
                      r + "/data"}},
        {"train", {"train", "--seed", "9", "--data", r + "/data/train.csv", "--mode", "ah_ascending", "--epochs", "4",
                   "--steps", "5", "--norm", "linf", "--eps", "0.1", "--out", r + "/model"}},
        {"frontier", {"frontier", "--seed", "9", "--model", r + "/model/model.json", "--data", r + "/data/test.csv",
                      "--norm", "linf", "--eps", "0.2", "--levels", "5", "--out", r + "/frontier"}},
        {"evaluate", {"evaluate", "--seed", "9", "--model", r + "/model/model.json", "--data", r + "/data/test.csv",
                      "--norm", "linf", "--eps", "0.2", "--transform", "median:3", "--per-example", "--out",
                      r + "/eval"}},
        {"converge", {"converge", "--seed", "9", "--model", r + "/model/model.json", "--data", r + "/data/test.csv",
                      "--norm", "linf", "--eps", "0.2", "--proxy", "8", "--n-values", "1,2,4", "--out", r + "/conv"}},
    };
    std::vector<std::map<std::string, std::map<std::string, std::string>>> runs(2);
    bool all_ok = true;
    std::ostringstream chatter;  // keep command summaries out of the verdict lines
    auto* saved = std::cout.rdbuf(chatter.rdbuf());
    for (auto& run : runs) {
        fs::remove_all(root);
        for (const auto& [name, args] : commands) {
            all_ok &= run_cli(args) == 0;
            run[name] = payload(args.back());
        }
    }
    std::cout.rdbuf(saved);
    fs::remove_all(root);
    std::size_t files = 0;
    std::vector<std::string> differing;
    for (const auto& [name, out] : runs[0]) {
        files += out.size();
        if (out != runs[1].at(name)) {
            differing.push_back(name);
        }
    }
    std::string diff;
    for (const auto& d : differing) {
        diff += " " + d;
    }
    return {pass_if(all_ok && differing.empty()),
            fmt("determinism: 5 CLI commands run twice, %zu payload files compared, %zu commands differ%s%s; %.1f s",
                files, differing.size(), diff.c_str(), all_ok ? "" : " (a command exited non-zero)",
                seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Line()>> criteria{hypervolume_oracle, gradient_correctness, convergence_law,
                                                      linear_optimality,  frontier_contracts,   training_ordering,
                                                      ascending_ablation, transform_reproduction, determinism};
    int only = 0;
    if (argc == 3 && std::strcmp(argv[1], "--only") == 0) {
        only = std::atoi(argv[2]);
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "usage: %s [--only 1..%zu]\n", argv[0], criteria.size());
        return 2;
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) {
            continue;
        }
        Line line;
        try {
            line = criteria[i]();
        } catch (const std::exception& e) {
            line = {Verdict::fail, std::string("threw: ") + e.what()};
        }
        const char* tag = line.verdict == Verdict::pass ? "PASS" : line.verdict == Verdict::fail ? "FAIL" : "FINDING";
        std::printf("[%s] criterion %zu: %s\n", tag, i + 1, line.text.c_str());
        std::fflush(stdout);
        failures += line.verdict == Verdict::fail ? 1 : 0;
    }
    return failures == 0 ? 0 : 1;
}
