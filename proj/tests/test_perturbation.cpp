#include <doctest.h>

#include <cmath>
#include <sstream>

#include "smoothnet/engine.hpp"
#include "smoothnet/perturbation.hpp"
#include "smoothnet/schedule.hpp"

using namespace smoothnet;

TEST_CASE("alpha 0 and 1 are deterministic") {
    const Schedule s = build_ccc(4, CccOrientation::AllUp);
    const PerturbationPlan none = sample_plan(s, 0.0, 99);
    CHECK(none.flip_count() == 0);
    const PerturbationPlan all = sample_plan(s, 1.0, 99);
    CHECK(all.flip_count() == s.balancer_count());
    for (std::size_t r = 1; r <= s.num_rounds(); ++r)
        for (std::size_t i = 0; i < s.round(r).balancers.size(); ++i) {
            CHECK(effective_orientation(s.round(r).balancers[i], none.flipped(r, i)) ==
                  Orientation::TowardU);
            CHECK(effective_orientation(s.round(r).balancers[i], all.flipped(r, i)) ==
                  Orientation::TowardV);
        }
}

TEST_CASE("alpha out of range rejected") {
    const Schedule s = build_ccc(2, CccOrientation::AllUp);
    CHECK_THROWS_AS(sample_plan(s, -0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(sample_plan(s, 1.1, 0), std::invalid_argument);
}

TEST_CASE("empirical flip fraction concentrates") {
    // 14 * 2^13 = 114688 balancers; 6 sigma of Bernoulli(0.3) is ~0.009
    const Schedule s = build_ccc(14, CccOrientation::AllUp);
    const PerturbationPlan p = sample_plan(s, 0.3, 2024);
    const double frac = static_cast<double>(p.flip_count()) /
                        static_cast<double>(s.balancer_count());
    CHECK(std::abs(frac - 0.3) < 0.01);
}

TEST_CASE("plans are reproducible bit for bit") {
    const Schedule s = build_ccc(6, CccOrientation::AllUp);
    const PerturbationPlan a = sample_plan(s, 0.37, 123456789);
    const PerturbationPlan b = sample_plan(s, 0.37, 123456789);
    CHECK(a.flips == b.flips);
    const PerturbationPlan c = sample_plan(s, 0.37, 123456790);
    CHECK(a.flips != c.flips);
}

TEST_CASE("psi and phi signs") {
    const Schedule s = build_ccc(3, CccOrientation::AllUp);
    const PerturbationPlan none = sample_plan(s, 0.0, 5);
    CHECK(psi_sign(none, 1, 0) == 0.5);
    const PerturbationPlan all = sample_plan(s, 1.0, 5);
    CHECK(psi_sign(all, 1, 0) == -0.5);

    CHECK(phi_sign(Balancer{0, 1, Orientation::TowardU}) == 1);
    CHECK(phi_sign(Balancer{0, 1, Orientation::TowardV}) == -1);
}

TEST_CASE("flip bits of different balancers decorrelate across seeds") {
    const Schedule s = build_ccc(3, CccOrientation::AllUp);
    const int samples = 10000;
    // track four balancer positions spread over the rounds
    const std::pair<std::size_t, std::size_t> picks[] = {{1, 0}, {1, 3}, {2, 1}, {3, 2}};
    int ones[4] = {0, 0, 0, 0};
    int joint[4][4] = {};
    for (int t = 0; t < samples; ++t) {
        const PerturbationPlan p = sample_plan(s, 0.5, 1000 + t);
        bool bit[4];
        for (int i = 0; i < 4; ++i) {
            bit[i] = p.flipped(picks[i].first, picks[i].second);
            ones[i] += bit[i];
        }
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) joint[i][j] += bit[i] && bit[j];
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const double pi = static_cast<double>(ones[i]) / samples;
            const double pj = static_cast<double>(ones[j]) / samples;
            const double cov = static_cast<double>(joint[i][j]) / samples - pi * pj;
            const double r = cov / std::sqrt(pi * (1 - pi) * pj * (1 - pj));
            CHECK(std::abs(r) <= 0.02);
        }
}

TEST_CASE("all-up unperturbed ccc drifts the top wire above the mean") {
    const Schedule s = build_ccc(3, CccOrientation::AllUp);
    const PerturbationPlan none = sample_plan(s, 0.0, 0);
    Rng rng(77);
    for (int c = 0; c < 50; ++c) {
        LoadVector input(8);
        std::int64_t total = 0;
        for (auto& x : input) {
            x = static_cast<std::int64_t>(rng.next_below(8));
            total += x;
        }
        const LoadVector out = run_discrete(s, none, input);
        // every excess token on wire 0's paths routes upward
        CHECK(static_cast<double>(out[0]) >=
              static_cast<double>(total) / 8.0 - 1e-12);
    }
}

TEST_CASE("hex dump has one line per round") {
    const Schedule s = build_ccc(4, CccOrientation::AllUp);
    const PerturbationPlan p = sample_plan(s, 0.5, 3);
    std::stringstream out;
    dump_flips_hex(p, out);
    int lines = 0;
    std::string line;
    while (std::getline(out, line)) {
        ++lines;
        CHECK(line.size() == 2); // 8 balancers per round -> 2 hex digits
    }
    CHECK(lines == 4);
}
