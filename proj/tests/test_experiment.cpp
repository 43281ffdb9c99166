#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "smoothnet/experiment.hpp"
#include "smoothnet/schedule.hpp"

using namespace smoothnet;

namespace {

ExperimentConfig small_ccc_config() {
    ExperimentConfig cfg;
    cfg.network.kind = NetworkSpec::Kind::Ccc;
    cfg.network.log_n = 8;
    cfg.alphas = {0.0, 0.25, 0.5};
    cfg.trials = 20;
    cfg.input = InputDist::uniform();
    cfg.base_seed = 42;
    return cfg;
}

bool rows_equal_ignoring_runtime(const std::vector<ResultRow>& a,
                                 const std::vector<ResultRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].n != b[i].n || a[i].alpha != b[i].alpha || a[i].trial != b[i].trial ||
            a[i].seed != b[i].seed || a[i].discrepancy != b[i].discrepancy ||
            a[i].max_above_mean != b[i].max_above_mean ||
            a[i].min_below_mean != b[i].min_below_mean)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("sweep is deterministic and matches the serial reference") {
    const ExperimentConfig cfg = small_ccc_config();
    const SweepResult a = run_sweep(cfg);
    const SweepResult b = run_sweep(cfg);
    const SweepResult c = run_sweep_serial(cfg);
    CHECK(rows_equal_ignoring_runtime(a.rows, b.rows));
    CHECK(rows_equal_ignoring_runtime(a.rows, c.rows));
    CHECK(a.rows.size() == 60);
    // rows ordered by (alpha index, trial index)
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].alpha == cfg.alphas[i / 20]);
        CHECK(a.rows[i].trial == static_cast<int>(i % 20));
    }
}

TEST_CASE("row fields are consistent") {
    const SweepResult r = run_sweep(small_ccc_config());
    for (const ResultRow& row : r.rows) {
        CHECK(row.discrepancy >= 0);
        CHECK(row.max_above_mean >= 0.0);
        CHECK(row.min_below_mean <= 0.0);
        CHECK(static_cast<double>(row.discrepancy) ==
              doctest::Approx(row.max_above_mean - row.min_below_mean).epsilon(1e-9));
    }
    // corridor bounds attached for a CCC network
    for (const AlphaSummary& s : r.summary) {
        CHECK(!std::isnan(s.bound_lower));
        CHECK(s.bound_lower <= s.bound_upper);
    }
}

TEST_CASE("constant inputs balance perfectly") {
    ExperimentConfig cfg = small_ccc_config();
    cfg.input = InputDist::constant(9);
    const SweepResult r = run_sweep(cfg);
    for (const ResultRow& row : r.rows) CHECK(row.discrepancy == 0);
    for (const AlphaSummary& s : r.summary) {
        CHECK(s.mean == 0.0);
        CHECK(s.stddev == 0.0);
    }
}

TEST_CASE("mean discrepancy decreases with alpha up to noise") {
    ExperimentConfig cfg = small_ccc_config();
    cfg.trials = 40;
    const SweepResult r = run_sweep(cfg);
    for (std::size_t i = 0; i + 1 < r.summary.size(); ++i) {
        const double noise =
            2.0 * (r.summary[i].stddev + r.summary[i + 1].stddev) /
            std::sqrt(static_cast<double>(cfg.trials));
        CHECK(r.summary[i + 1].mean <= r.summary[i].mean + noise);
    }
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_ccc_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_ccc_config();
    cfg.alphas = {1.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_ccc_config();
    cfg.alphas.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("csv format") {
    std::vector<ResultRow> rows(2);
    rows[0] = ResultRow{16, 0.1, 0, 7, 3, 1.5, -1.5, 0.25};
    rows[1] = ResultRow{16, 0.1, 1, 8, 2, 1.0, -1.0, 0.5};
    std::stringstream out;
    emit_csv(rows, out);
    std::string line;
    std::getline(out, line);
    CHECK(line == "n,alpha,trial,seed,discrepancy,max_above_mean,min_below_mean,runtime_ms");
    int count = 0;
    while (std::getline(out, line)) ++count;
    CHECK(count == 2);
    CHECK_THROWS_AS(emit_csv({}, out), std::invalid_argument);
}

TEST_CASE("csv is byte-stable apart from the runtime column") {
    ExperimentConfig cfg = small_ccc_config();
    cfg.trials = 5;
    auto scrub = [](const SweepResult& r) {
        std::vector<ResultRow> rows = r.rows;
        for (ResultRow& row : rows) row.runtime_ms = 0.0;
        std::stringstream out;
        emit_csv(rows, out);
        return out.str();
    };
    CHECK(scrub(run_sweep(cfg)) == scrub(run_sweep(cfg)));
    CHECK(scrub(run_sweep(cfg)) == scrub(run_sweep_serial(cfg)));
}

TEST_CASE("svg output") {
    std::vector<AlphaSummary> summary(1);
    summary[0] = AlphaSummary{0.25, 4.5, 1.0, 3.0, 10.0};
    std::stringstream out;
    emit_summary_svg(summary, out);
    const std::string svg = out.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("circle") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK_THROWS_AS(emit_summary_svg({}, out), std::invalid_argument);
}

TEST_CASE("network construction from specs") {
    NetworkSpec ccc;
    ccc.kind = NetworkSpec::Kind::Ccc;
    ccc.log_n = 3;
    CHECK(build_network(ccc).n() == 8);

    // a drawn-then-fixed random orientation is reproducible
    ccc.orient = CccOrientation::PerBalancerList;
    ccc.orient_seed = 99;
    const Schedule a = build_network(ccc);
    const Schedule b = build_network(ccc);
    CHECK(a == b);
    CHECK(ccc_log_n(a) == 3);

    const std::string path = "network_spec_roundtrip.sched";
    save_schedule(a, path);
    NetworkSpec file;
    file.kind = NetworkSpec::Kind::ScheduleFile;
    file.path = path;
    CHECK(build_network(file) == a);

    NetworkSpec periodic;
    periodic.kind = NetworkSpec::Kind::PeriodicFile;
    periodic.path = path;
    periodic.periods = 3;
    CHECK(build_network(periodic).num_rounds() == 9);
    std::remove(path.c_str());
}
