#include <doctest.h>

#include <cmath>
#include <random>

#include "advfront/error.hpp"
#include "advfront/hypervolume.hpp"
#include "oracles.hpp"

using namespace advfront;

namespace {

AdversarialFrontier from_confidences(const std::vector<double>& conf, std::size_t n,
                                     std::optional<std::size_t> truncated = std::nullopt) {
    AdversarialFrontier f;
    f.n_levels = n;
    f.epsilon = 1.0;
    for (std::size_t i = 0; i < conf.size(); ++i) {
        FrontierPoint p;
        p.level_index = i;
        p.level_fraction = static_cast<double>(i) / static_cast<double>(n);
        p.confidence = conf[i];
        p.raw_confidence = conf[i];
        f.points.push_back(p);
    }
    f.truncated_at = truncated;
    return f;
}

// Random non-increasing staircase; about a third are truncated early.
AdversarialFrontier random_staircase(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> conf{u(rng)};
    std::optional<std::size_t> trunc;
    for (std::size_t i = 1; i <= n; ++i) {
        if (u(rng) < 0.05) {
            conf.push_back(0.0);
            trunc = i;
            break;
        }
        conf.push_back(conf.back() * u(rng) * 0.3 + conf.back() * 0.7 * (u(rng) < 0.5 ? 1.0 : u(rng)));
    }
    return from_confidences(conf, n, trunc);
}

double grid_measure(const AdversarialFrontier& f) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : f.points) {
        xs.push_back(p.level_fraction);
        ys.push_back(p.confidence);
    }
    return oracle::grid_box_union(xs, ys, 2000);
}

}  // namespace

TEST_SUITE("hypervolume") {

TEST_CASE("constant and maximal frontiers") {
    const auto c = hypervolume_2d(from_confidences({0.4, 0.4, 0.4, 0.4, 0.4}, 4), {0.0, 0.0, 4});
    CHECK(c.ah == doctest::Approx(0.4));
    const auto one = hypervolume_2d(from_confidences({1.0, 1.0, 1.0}, 2), {0.0, 0.0, 2});
    CHECK(one.ah == doctest::Approx(1.0));
}

TEST_CASE("clean-misclassified frontier is excluded with AH 0") {
    auto f = from_confidences({0.0}, 10, 0);
    f.clean_misclassified = true;
    const auto r = hypervolume_2d(f, {0.0, 0.0, 10});
    CHECK(r.ah == 0.0);
    CHECK(r.excluded);
}

TEST_CASE("AH matches the grid measure of the box union") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 3 + rng() % 18;
        const auto f = random_staircase(rng, n);
        const auto r = hypervolume_2d(f, {0.0, 0.0, n});
        CHECK(std::abs(r.ah - grid_measure(f)) < 2e-3);
        double sum = 0.0;
        for (double a : r.per_interval_areas) {
            sum += a;
        }
        CHECK(std::abs(sum - r.ah) < 1e-12);
        CHECK(r.ah >= 0.0);
        CHECK(r.ah <= 1.0);
    }
}

TEST_CASE("AH is monotone under pointwise domination") {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 10;
        auto f = random_staircase(rng, n);
        auto g = f;
        for (auto& p : g.points) {
            p.confidence *= 0.8;
        }
        CHECK(hypervolume_2d(g, {0.0, 0.0, n}).ah <= hypervolume_2d(f, {0.0, 0.0, n}).ah + 1e-15);
    }
}

TEST_CASE("contract violations") {
    const HvConfig cfg{0.0, 0.0, 3};
    CHECK_THROWS_AS(hypervolume_2d(from_confidences({0.5, 0.6, 0.2, 0.1}, 3), cfg), ContractError);
    CHECK_THROWS_AS(hypervolume_2d(from_confidences({0.5, 1.2}, 3), cfg), ContractError);
    auto unordered = from_confidences({0.5, 0.4, 0.3}, 3);
    std::swap(unordered.points[1], unordered.points[2]);
    CHECK_THROWS_AS(hypervolume_2d(unordered, cfg), ContractError);
    CHECK_THROWS_AS(hypervolume_2d(from_confidences({0.5, 0.4}, 3), HvConfig{0.0, 0.0, 5}), ContractError);
    CHECK_THROWS_AS(hypervolume_2d(from_confidences({0.5, 0.4}, 3), HvConfig{0.0, 0.45, 3}), ContractError);
}

TEST_CASE("error bound") {
    CHECK(error_bound(1.0, 10, 2.0) == doctest::Approx(0.2));
    CHECK(error_bound(0.5, 20, 3.0) == doctest::Approx(error_bound(0.5, 10, 3.0) / 2.0));
    CHECK(error_bound(0.7, 4, 0.0) == 0.0);
}

TEST_CASE("aggregate") {
    const std::vector<AhResult> two{{0.2, {}, false}, {0.4, {}, false}};
    const auto a = aggregate(two);
    CHECK(a.ah_mean == doctest::Approx(0.3));
    CHECK(a.ah_std == doctest::Approx(0.1));
    const std::vector<AhResult> single{{0.7, {}, false}};
    CHECK(aggregate(single).ah_std == 0.0);
    const std::vector<AhResult> mixed{{0.0, {}, true}, {0.5, {}, false}};
    const auto m = aggregate(mixed);
    CHECK(m.ah_mean == doctest::Approx(0.5));
    CHECK(m.count_excluded == 1);
    const std::vector<AhResult> none{{0.0, {}, true}};
    const auto z = aggregate(none);
    CHECK(z.all_excluded);
    CHECK(z.ah_mean == 0.0);
    CHECK(z.ah_std == 0.0);
}

TEST_CASE("linear frontier: right-endpoint AH and convergence") {
    const auto line = [](double t) { return 1.0 - t; };
    for (std::size_t n : {2u, 5u, 16u}) {
        const double ah = hypervolume_2d(frontier_from_curve(line, 1.0, n), {0.0, 0.0, n}).ah;
        CHECK(ah == doctest::Approx(0.5 - 0.5 / static_cast<double>(n)).epsilon(1e-12));
    }
    const std::vector<std::size_t> ns{2, 4, 8, 16, 32, 64};
    const auto fit = convergence_from_curve(line, 1.0, 128, ns);
    REQUIRE(fit.samples.size() == ns.size() + 1);
    CHECK(fit.samples.back().n_levels == 128);
    CHECK(fit.samples.back().observed_error == 0.0);
    for (const auto& s : fit.samples) {
        if (s.n_levels != 128) {
            const double want = 0.5 / static_cast<double>(s.n_levels) - 0.5 / 128.0;
            CHECK(s.observed_error == doctest::Approx(want).epsilon(1e-12));
        }
    }
    const double slope = loglog_slope(fit.samples);
    CHECK(slope >= -1.3);
    CHECK(slope <= -0.7);
    // The least-squares constant approaches the per-interval error factor 1/2.
    CHECK(fit.l0_fit == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("constant frontier has zero error and zero L0") {
    const std::vector<std::size_t> ns{2, 4, 8};
    const auto fit = convergence_from_curve([](double) { return 0.6; }, 0.5, 32, ns);
    for (const auto& s : fit.samples) {
        CHECK(s.observed_error == doctest::Approx(0.0));
    }
    CHECK(fit.l0_fit < 1e-12);
}

TEST_CASE("closed-form L0 recovers an exact 1/N law") {
    std::vector<ConvergenceSample> samples;
    for (std::size_t n : {1u, 3u, 9u}) {
        samples.push_back({n, 0.0, 0.25 * 0.25 * 1.7 / static_cast<double>(n)});
    }
    CHECK(fit_l0(samples, 0.25) == doctest::Approx(1.7));
    CHECK(loglog_slope(samples) == doctest::Approx(-1.0));
    for (auto& s : samples) {
        s.observed_error = -s.observed_error;
    }
    CHECK(fit_l0(samples, 0.25) == 0.0);
}

TEST_CASE("convergence experiment preconditions") {
    const std::vector<std::size_t> dims{2, 2};
    const auto model = make_mlp(dims, 1);
    AttackConfig attack;
    attack.epsilon = 0.1;
    attack.step_size = 0.01;
    const std::vector<std::size_t> ns{2, 4};
    LabeledDataset empty;
    empty.features = Matrix(0, 2);
    empty.num_classes = 2;
    CHECK_THROWS_AS(convergence_experiment(model, empty, 0.1, 8, ns, attack), InputError);
    const auto ds = gen_blobs(5, 2, 2, 0.5, 0.1, 1);
    CHECK_THROWS_AS(convergence_experiment(model, ds, 0.1, 4, ns, attack), ConfigError);
    const auto fit = convergence_experiment(model, ds, 0.1, 6, ns, attack);
    CHECK(fit.samples.back().observed_error == 0.0);
    CHECK(fit.l0_fit >= 0.0);
}

}  // TEST_SUITE
