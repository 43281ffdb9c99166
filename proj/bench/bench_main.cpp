// Compares the OpenMP kernels against their serial reference
// implementations: alpha sweeps (parallel over trials), odd-indicator
// statistics (parallel with merged counters), and the per-wire spectral
// sweep. Results must be identical; only the wall time differs.

#include <chrono>
#include <cstdio>
#include <string>

#include "smoothnet/experiment.hpp"
#include "smoothnet/parallel.hpp"
#include "smoothnet/schedule.hpp"
#include "smoothnet/spectral.hpp"
#include "smoothnet/verification.hpp"

using namespace smoothnet;

namespace {

template <typename F>
double time_ms(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s serial %8.1f ms   openmp %8.1f ms   speedup %.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "results identical" : "RESULTS DIFFER");
}

} // namespace

int main() {
    std::printf("workers: %d\n\n", worker_count());

    {
        ExperimentConfig cfg;
        cfg.network.kind = NetworkSpec::Kind::Ccc;
        cfg.network.log_n = 14;
        cfg.alphas = {0.0, 0.25, 0.5};
        cfg.trials = 60;
        cfg.input = InputDist::uniform();
        cfg.base_seed = 7;
        SweepResult serial, parallel;
        const double ts = time_ms([&] { serial = run_sweep_serial(cfg); });
        const double tp = time_ms([&] { parallel = run_sweep(cfg); });
        bool same = serial.rows.size() == parallel.rows.size();
        for (std::size_t i = 0; same && i < serial.rows.size(); ++i)
            same = serial.rows[i].discrepancy == parallel.rows[i].discrepancy &&
                   serial.rows[i].seed == parallel.rows[i].seed;
        report("alpha sweep (ccc 2^14)", ts, tp, same);
    }

    {
        const Schedule s = build_ccc(9, CccOrientation::AllUp);
        OddStats serial, parallel;
        const double ts = time_ms(
            [&] { serial = collect_odd_stats_serial(s, 6000, 3, InputDist::uniform()); });
        const double tp =
            time_ms([&] { parallel = collect_odd_stats(s, 6000, 3, InputDist::uniform()); });
        report("odd statistics (ccc 2^9)", ts, tp, serial.odd == parallel.odd);
    }

    {
        const Schedule s = build_ccc(10, CccOrientation::AllUp);
        double serial = 0, parallel = 0;
        const double ts = time_ms([&] { serial = lambda1_all_serial(s, 7, 10); });
        const double tp = time_ms([&] { parallel = lambda1_all(s, 7, 10); });
        report("per-wire spectral sweep", ts, tp, serial == parallel);
    }
    return 0;
}
