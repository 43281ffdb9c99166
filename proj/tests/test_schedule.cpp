#include <doctest.h>

#include <set>
#include <sstream>

#include "smoothnet/rng.hpp"
#include "smoothnet/schedule.hpp"

using namespace smoothnet;

namespace {

// Forward-reachability oracle for affecting sets: a balancer affects `wire`
// iff some endpoint reaches it through consecutive later rounds.
bool affects_by_forward_paths(const Schedule& s, std::size_t round, const Balancer& b,
                              std::uint32_t wire) {
    std::set<std::uint32_t> frontier{b.u, b.v};
    for (std::size_t r = round + 1; r <= s.num_rounds(); ++r) {
        std::set<std::uint32_t> next = frontier;
        for (const Balancer& c : s.round(r).balancers)
            if (frontier.count(c.u) || frontier.count(c.v)) {
                next.insert(c.u);
                next.insert(c.v);
            }
        frontier = std::move(next);
    }
    return frontier.count(wire) > 0;
}

Schedule random_schedule(std::uint32_t n, std::size_t rounds, Rng& rng) {
    std::vector<Matching> ms(rounds);
    for (auto& m : ms) {
        std::vector<std::uint32_t> perm(n);
        for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
        for (std::uint32_t i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next_below(i + 1)]);
        for (std::uint32_t i = 0; i + 1 < n; i += 2) {
            if (rng.next_unit() < 0.3) continue;
            m.balancers.push_back(Balancer{std::min(perm[i], perm[i + 1]),
                                           std::max(perm[i], perm[i + 1]),
                                           rng.next_bernoulli(0.5)
                                               ? Orientation::TowardU
                                               : Orientation::TowardV});
        }
    }
    return Schedule(n, std::move(ms));
}

} // namespace

TEST_CASE("ccc layout for log_n=4") {
    const Schedule s = build_ccc(4, CccOrientation::AllUp);
    CHECK(s.n() == 16);
    CHECK(s.num_rounds() == 4);
    CHECK(s.balancer_count() == 32);
    for (std::size_t r = 1; r <= 4; ++r) CHECK(s.round(r).balancers.size() == 8);

    // layer 1 pairs (0,8)..(7,15), layer 4 pairs (0,1),(2,3),..
    for (std::uint32_t i = 0; i < 8; ++i) {
        CHECK(s.round(1).balancers[i].u == i);
        CHECK(s.round(1).balancers[i].v == i + 8);
        CHECK(s.round(4).balancers[i].u == 2 * i);
        CHECK(s.round(4).balancers[i].v == 2 * i + 1);
    }
    // layer l flips exactly bit (log n - l)
    for (std::size_t l = 1; l <= 4; ++l)
        for (const Balancer& b : s.round(l).balancers) {
            CHECK(b.v == (b.u ^ (1u << (4 - l))));
            CHECK(b.orient == Orientation::TowardU);
        }
}

TEST_CASE("smallest ccc") {
    const Schedule s = build_ccc(1, CccOrientation::AllUp);
    CHECK(s.n() == 2);
    CHECK(s.num_rounds() == 1);
    REQUIRE(s.round(1).balancers.size() == 1);
    CHECK(s.round(1).balancers[0] == Balancer{0, 1, Orientation::TowardU});
}

TEST_CASE("ccc rejects bad log_n") {
    CHECK_THROWS_AS(build_ccc(0, CccOrientation::AllUp), std::invalid_argument);
    CHECK_THROWS_AS(build_ccc(31, CccOrientation::AllUp), std::invalid_argument);
}

TEST_CASE("ccc with explicit orientation list") {
    std::vector<Orientation> os(4, Orientation::TowardV);
    os[2] = Orientation::TowardU;
    const Schedule s = build_ccc(2, CccOrientation::PerBalancerList, os);
    CHECK(s.round(1).balancers[0].orient == Orientation::TowardV);
    CHECK(s.round(2).balancers[0].orient == Orientation::TowardU);
    os.pop_back();
    CHECK_THROWS_AS(build_ccc(2, CccOrientation::PerBalancerList, os),
                    std::invalid_argument);
}

TEST_CASE("ccc detection") {
    CHECK(ccc_log_n(build_ccc(3, CccOrientation::AllDown)) == 3);
    // swapping two rounds breaks the layer structure
    const Schedule s = build_ccc(3, CccOrientation::AllUp);
    std::vector<Matching> rounds = {s.round(2), s.round(1), s.round(3)};
    CHECK(!ccc_log_n(Schedule(8, rounds)));
    CHECK(!ccc_log_n(Schedule(8, {s.round(1)})));
    CHECK(!ccc_log_n(Schedule(3, {Matching{{Balancer{0, 1}}}})));
}

TEST_CASE("periodic repetition") {
    Matching m1{{Balancer{0, 1, Orientation::TowardU}}};
    Matching m2{{Balancer{1, 2, Orientation::TowardV}}};
    const Schedule s = build_periodic(4, {m1, m2}, 3);
    CHECK(s.num_rounds() == 6);
    for (std::size_t r = 1; r <= 6; ++r) CHECK(s.round(r) == (r % 2 == 1 ? m1 : m2));

    const Schedule one = build_periodic(4, {m1, m2}, 1);
    CHECK(one.rounds() == std::vector<Matching>{m1, m2});

    Matching pair4{{Balancer{0, 1}, Balancer{2, 3}}};
    const Schedule two = build_periodic(4, {pair4}, 2);
    CHECK(two.num_rounds() == 2);
    CHECK(two.round(1) == pair4);
    CHECK(two.round(2) == pair4);
}

TEST_CASE("schedule validation") {
    CHECK_THROWS_WITH_AS(Schedule(4, {Matching{{Balancer{0, 1}, Balancer{1, 2}}}}),
                         doctest::Contains("duplicate vertex"), std::invalid_argument);
    CHECK_THROWS_AS(Schedule(4, {Matching{{Balancer{0, 5}}}}), std::invalid_argument);
    CHECK_THROWS_AS(Schedule(4, {Matching{{Balancer{2, 1}}}}), std::invalid_argument);
    CHECK_THROWS_AS(build_periodic(4, {}, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_periodic(4, {Matching{}}, 0), std::invalid_argument);
}

TEST_CASE("schedule file round-trip") {
    const Schedule s = build_ccc(3, CccOrientation::AllUp);
    std::stringstream buf;
    save_schedule(s, buf);
    CHECK(load_schedule(buf) == s);

    // round-trip is byte-stable
    std::stringstream buf2, buf3;
    save_schedule(s, buf2);
    const std::string text = buf2.str();
    std::stringstream in(text);
    save_schedule(load_schedule(in), buf3);
    CHECK(buf3.str() == text);
}

TEST_CASE("empty matchings survive a round-trip") {
    const Schedule s(4, {Matching{}, Matching{{Balancer{0, 1}}}});
    std::stringstream buf;
    save_schedule(s, buf);
    CHECK(load_schedule(buf) == s);
}

TEST_CASE("schedule file accepts comments") {
    std::stringstream in("# header comment\nsmoothnet-schedule v1\nn=4 T=1\n"
                         "# round comment\nround 1\n0 1 U\n2 3 V\n");
    const Schedule s = load_schedule(in);
    CHECK(s.n() == 4);
    CHECK(s.round(1).balancers[1].orient == Orientation::TowardV);
}

TEST_CASE("schedule file errors carry line numbers") {
    {
        std::stringstream in("smoothnet-schedule v1\nn=8 T=1\nround 1\n0 9 U\n");
        CHECK_THROWS_WITH_AS(load_schedule(in), doctest::Contains("out of range"),
                             ScheduleIoError);
    }
    {
        std::stringstream in("smoothnet-schedule v1\nn=8 T=1\nround 1\n0 3 U\n3 5 U\n");
        try {
            load_schedule(in);
            FAIL("expected parse error");
        } catch (const ScheduleIoError& e) {
            CHECK(e.line() == 5);
            CHECK(std::string(e.what()).find("duplicate vertex in matching") !=
                  std::string::npos);
        }
    }
    {
        std::stringstream in("not-a-schedule\n");
        CHECK_THROWS_AS(load_schedule(in), ScheduleIoError);
    }
    {
        std::stringstream in("smoothnet-schedule v1\nn=8 T=2\nround 1\n0 1 U\n");
        CHECK_THROWS_AS(load_schedule(in), ScheduleIoError);
    }
}

TEST_CASE("affecting sets on the ccc") {
    const Schedule s = build_ccc(4, CccOrientation::AllUp);
    const AffectingSet a = affecting_sets(s, 0);
    REQUIRE(a.per_round.size() == 4);
    CHECK(a.per_round[0].size() == 8);
    CHECK(a.per_round[1].size() == 4);
    CHECK(a.per_round[2].size() == 2);
    CHECK(a.per_round[3].size() == 1);

    // n=4, wire 0: layer 1 {(0,2),(1,3)}, layer 2 {(0,1)}
    const Schedule s4 = build_ccc(2, CccOrientation::AllUp);
    const AffectingSet a4 = affecting_sets(s4, 0);
    REQUIRE(a4.per_round[0].size() == 2);
    CHECK(s4.round(1).balancers[a4.per_round[0][0]] == Balancer{0, 2, Orientation::TowardU});
    CHECK(s4.round(1).balancers[a4.per_round[0][1]] == Balancer{1, 3, Orientation::TowardU});
    REQUIRE(a4.per_round[1].size() == 1);
    CHECK(s4.round(2).balancers[a4.per_round[1][0]] == Balancer{0, 1, Orientation::TowardU});
}

TEST_CASE("affecting sets of a single round") {
    const Schedule s(4, {Matching{{Balancer{0, 1}, Balancer{2, 3}}}});
    const AffectingSet a = affecting_sets(s, 0);
    REQUIRE(a.per_round[0].size() == 1);
    CHECK(s.round(1).balancers[a.per_round[0][0]].u == 0);
    CHECK_THROWS_AS(affecting_sets(s, 4), std::invalid_argument);
}

TEST_CASE("affecting sets match forward-path enumeration") {
    Rng rng(7);
    for (int c = 0; c < 20; ++c) {
        const std::uint32_t n = 4 + 2 * static_cast<std::uint32_t>(rng.next_below(6));
        const Schedule s = random_schedule(n, 1 + rng.next_below(6), rng);
        const std::uint32_t wire = static_cast<std::uint32_t>(rng.next_below(n));
        const AffectingSet a = affecting_sets(s, wire);
        for (std::size_t r = 1; r <= s.num_rounds(); ++r) {
            std::set<std::uint32_t> selected(a.per_round[r - 1].begin(),
                                             a.per_round[r - 1].end());
            for (std::uint32_t i = 0; i < s.round(r).balancers.size(); ++i)
                CHECK(selected.count(i) ==
                      (affects_by_forward_paths(s, r, s.round(r).balancers[i], wire)
                           ? 1u
                           : 0u));
        }
    }
}

TEST_CASE("last x layers of the ccc stay inside 2^x blocks") {
    const Schedule s = build_ccc(5, CccOrientation::AllUp);
    for (int x = 1; x <= 5; ++x)
        for (std::size_t r = static_cast<std::size_t>(5 - x + 1); r <= 5; ++r)
            for (const Balancer& b : s.round(r).balancers)
                CHECK((b.u >> x) == (b.v >> x));
}

TEST_CASE("flip_all_orientations toggles every balancer") {
    const Schedule s = build_ccc(3, CccOrientation::AllUp);
    const Schedule f = flip_all_orientations(s);
    for (std::size_t r = 1; r <= s.num_rounds(); ++r)
        for (std::size_t i = 0; i < s.round(r).balancers.size(); ++i)
            CHECK(f.round(r).balancers[i].orient == Orientation::TowardV);
}
