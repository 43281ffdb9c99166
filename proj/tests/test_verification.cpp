#include <doctest.h>

#include <sstream>

#include "smoothnet/schedule.hpp"
#include "smoothnet/verification.hpp"

using namespace smoothnet;

TEST_CASE("parallel and serial odd statistics are identical") {
    const Schedule s = build_ccc(5, CccOrientation::AllUp);
    const std::vector<std::pair<BalancerRef, BalancerRef>> pairs{
        {BalancerRef{1, 0}, BalancerRef{2, 0}},
        {BalancerRef{1, 1}, BalancerRef{1, 2}},
    };
    const OddStats par = collect_odd_stats(s, 2000, 17, InputDist::uniform(), pairs);
    const OddStats ser =
        collect_odd_stats_serial(s, 2000, 17, InputDist::uniform(), pairs);
    CHECK(par.odd == ser.odd);
    REQUIRE(par.pairs.size() == ser.pairs.size());
    for (std::size_t i = 0; i < par.pairs.size(); ++i) {
        CHECK(par.pairs[i].n11 == ser.pairs[i].n11);
        CHECK(par.pairs[i].n10 == ser.pairs[i].n10);
        CHECK(par.pairs[i].n01 == ser.pairs[i].n01);
    }
    // counts stay consistent
    for (const auto& p : par.pairs) CHECK(p.n11 + p.n10 + p.n01 <= par.trials);
    for (auto c : par.odd) CHECK(c <= par.trials);
}

TEST_CASE("odd indicators are fair coins on uniform inputs") {
    for (const CccOrientation o :
         {CccOrientation::AllUp, CccOrientation::AllDown}) {
        const Schedule s = build_ccc(6, o);
        const VerificationReport rep = verify_odd_half(s, 20000, 7, 0.02);
        INFO(rep.one_line());
        CHECK(rep.pass);
        CHECK(rep.worst <= 0.02);
    }
}

TEST_CASE("constant inputs break the fair-coin property") {
    const Schedule s = build_ccc(6, CccOrientation::AllUp);
    const VerificationReport rep =
        verify_odd_half(s, 2000, 7, 0.015, InputDist::constant(4));
    CHECK(!rep.pass);
    CHECK(rep.worst == 0.5); // every balancer sees an even sum, p_hat = 0
}

TEST_CASE("odd-half input validation") {
    const Schedule not_ccc(4, {Matching{{Balancer{0, 1}}}});
    CHECK_THROWS_AS(verify_odd_half(not_ccc, 2000, 0, 0.01), std::invalid_argument);
    const Schedule s = build_ccc(3, CccOrientation::AllUp);
    CHECK_THROWS_AS(verify_odd_half(s, 999, 0, 0.01), std::invalid_argument);
}

TEST_CASE("odd indicators decorrelate within an affecting set") {
    const Schedule s = build_ccc(6, CccOrientation::AllUp);
    OddStats stats;
    const VerificationReport rep =
        verify_odd_independence(s, 0, 20000, 3, 0.04, 200, &stats);
    INFO(rep.one_line());
    CHECK(rep.pass);

    // the sample must include cross-layer pairs that share an endpoint
    bool has_connected = false;
    for (const auto& p : stats.pairs) {
        if (p.b.round != p.a.round + 1) continue;
        const Balancer& a = s.round(p.a.round).balancers[p.a.index];
        const Balancer& b = s.round(p.b.round).balancers[p.b.index];
        if (a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v) has_connected = true;
    }
    CHECK(has_connected);
    CHECK(stats.pairs.size() <= 200);
}

TEST_CASE("optional triple-wise check") {
    const Schedule s = build_ccc(5, CccOrientation::AllUp);
    OddStats stats;
    const VerificationReport rep =
        verify_odd_independence(s, 0, 10000, 11, 0.05, 100, &stats, true);
    INFO(rep.one_line());
    CHECK(rep.pass);
    CHECK(!stats.triples.empty());
    for (const auto& t : stats.triples) CHECK(t.all_odd <= stats.trials);
    CHECK(rep.detail.find("triples=") != std::string::npos);
}

TEST_CASE("pearson of hand-built counts") {
    OddStats stats;
    stats.trials = 100;
    // perfectly correlated pair
    OddStats::PairCounts same{BalancerRef{1, 0}, BalancerRef{1, 1}, 50, 0, 0};
    CHECK(stats.pearson(same) == doctest::Approx(1.0));
    // independent-looking pair
    OddStats::PairCounts indep{BalancerRef{1, 0}, BalancerRef{1, 1}, 25, 25, 25};
    CHECK(stats.pearson(indep) == doctest::Approx(0.0));
    // degenerate margins give 0 rather than NaN
    OddStats::PairCounts degenerate{BalancerRef{1, 0}, BalancerRef{1, 1}, 0, 0, 0};
    CHECK(stats.pearson(degenerate) == 0.0);
}

TEST_CASE("deviation unfolding identity holds exactly on random cases") {
    const VerificationReport rep = verify_eq3_identity(16, 8, 40, 2024);
    INFO(rep.detail);
    CHECK(rep.pass);
    CHECK(rep.worst == 0.0);
    CHECK(rep.threshold == 0.0);
}

TEST_CASE("ccc structure checks") {
    for (int log_n = 1; log_n <= 5; ++log_n) {
        const VerificationReport rep = verify_ccc_structure(log_n);
        INFO(rep.one_line());
        CHECK(rep.pass);
    }
    CHECK_THROWS_AS(verify_ccc_structure(9), std::invalid_argument);
}

TEST_CASE("flip-all symmetry") {
    const Schedule s = build_ccc(4, CccOrientation::AllUp);
    SUBCASE("deterministic endpoints alpha=0 vs 1") {
        const VerificationReport rep = verify_remark2_symmetry(s, 0.0, 10000, 5);
        CHECK(rep.pass);
        CHECK(rep.worst == 0.0);
    }
    SUBCASE("alpha=0.5 is self-symmetric") {
        const VerificationReport rep = verify_remark2_symmetry(s, 0.5, 10000, 5);
        INFO(rep.one_line());
        CHECK(rep.pass);
    }
    SUBCASE("alpha=0.3 vs flipped 0.7") {
        const VerificationReport rep = verify_remark2_symmetry(s, 0.3, 10000, 5);
        INFO(rep.one_line());
        CHECK(rep.pass);
        CHECK(rep.worst <= 0.04);
    }
}

TEST_CASE("odd stats detail csv") {
    const Schedule s = build_ccc(2, CccOrientation::AllUp);
    const OddStats stats = collect_odd_stats(s, 2000, 1, InputDist::uniform());
    std::stringstream out;
    write_odd_stats_csv(s, stats, out);
    std::string line;
    std::getline(out, line);
    CHECK(line == "round,index,u,v,p_hat,abs_dev");
    int rows = 0;
    while (std::getline(out, line)) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("report formatting") {
    VerificationReport rep;
    rep.check = "sample";
    rep.pass = true;
    rep.worst = 0.01;
    rep.threshold = 0.02;
    rep.samples = 1000;
    CHECK(rep.one_line().rfind("PASS sample", 0) == 0);
    rep.pass = false;
    CHECK(rep.one_line().rfind("FAIL sample", 0) == 0);
}
