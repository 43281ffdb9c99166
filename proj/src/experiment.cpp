#include "smoothnet/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "smoothnet/parallel.hpp"
#include "smoothnet/perturbation.hpp"
#include "smoothnet/rng.hpp"
#include "smoothnet/spectral.hpp"

namespace smoothnet {

Schedule build_network(const NetworkSpec& spec) {
    switch (spec.kind) {
    case NetworkSpec::Kind::Ccc: {
        if (spec.orient == CccOrientation::PerBalancerList) {
            // a randomly drawn, then fixed, orientation
            const std::uint32_t n = 1u << spec.log_n;
            Rng rng(spec.orient_seed);
            std::vector<Orientation> os(static_cast<std::size_t>(spec.log_n) * (n / 2));
            for (auto& o : os)
                o = rng.next_bernoulli(0.5) ? Orientation::TowardV : Orientation::TowardU;
            return build_ccc(spec.log_n, CccOrientation::PerBalancerList, os);
        }
        return build_ccc(spec.log_n, spec.orient);
    }
    case NetworkSpec::Kind::PeriodicFile: {
        const Schedule round = load_schedule(spec.path);
        return build_periodic(round.n(), round.rounds(), spec.periods);
    }
    case NetworkSpec::Kind::ScheduleFile:
        return load_schedule(spec.path);
    }
    throw std::invalid_argument("build_network: bad network kind");
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (alphas.empty()) throw std::invalid_argument("config: need at least one alpha");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("config: alphas must lie in [0,1]");
}

namespace {

ResultRow run_one_trial(const Schedule& s, const ExperimentConfig& cfg,
                        std::size_t alpha_idx, int trial) {
    const auto start = std::chrono::steady_clock::now();
    const double alpha = cfg.alphas[alpha_idx];
    const std::uint64_t seed =
        cfg.base_seed + static_cast<std::uint64_t>(alpha_idx) *
                            static_cast<std::uint64_t>(cfg.trials) +
        static_cast<std::uint64_t>(trial);
    // independent streams for the input and the perturbation
    std::uint64_t chain = seed;
    const std::uint64_t input_seed = splitmix64(chain);
    const std::uint64_t plan_seed = splitmix64(chain);

    Rng input_rng(input_seed);
    const LoadVector input = sample_input(cfg.input, s.n(), input_rng);
    const PerturbationPlan plan = sample_plan(s, alpha, plan_seed);
    const LoadVector out = run_discrete(s, plan, input);

    std::int64_t lo = out[0], hi = out[0], total = 0;
    for (std::int64_t x : out) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        total += x;
    }
    const double mu = static_cast<double>(total) / static_cast<double>(s.n());

    ResultRow row;
    row.n = s.n();
    row.alpha = alpha;
    row.trial = trial;
    row.seed = seed;
    row.discrepancy = hi - lo;
    row.max_above_mean = static_cast<double>(hi) - mu;
    row.min_below_mean = static_cast<double>(lo) - mu;
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return row;
}

SweepResult sweep_impl(const ExperimentConfig& cfg, bool parallel) {
    cfg.validate();
    const Schedule s = build_network(cfg.network);
    const std::size_t total = cfg.alphas.size() * static_cast<std::size_t>(cfg.trials);
    std::vector<ResultRow> rows(total);

    const int nt = parallel ? worker_count() : 1;
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (parallel)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
        const std::size_t ai = static_cast<std::size_t>(idx) /
                               static_cast<std::size_t>(cfg.trials);
        const int trial = static_cast<int>(idx % cfg.trials);
        rows[static_cast<std::size_t>(idx)] = run_one_trial(s, cfg, ai, trial);
    }

    SweepResult result;
    result.rows = std::move(rows);
    result.summary.reserve(cfg.alphas.size());
    const auto ccc = ccc_log_n(s);
    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
        AlphaSummary sum;
        sum.alpha = cfg.alphas[ai];
        double mean = 0.0;
        for (int t = 0; t < cfg.trials; ++t)
            mean += static_cast<double>(
                result.rows[ai * static_cast<std::size_t>(cfg.trials) +
                            static_cast<std::size_t>(t)]
                    .discrepancy);
        mean /= cfg.trials;
        double var = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
            const double d = static_cast<double>(
                                 result.rows[ai * static_cast<std::size_t>(cfg.trials) +
                                             static_cast<std::size_t>(t)]
                                     .discrepancy) -
                             mean;
            var += d * d;
        }
        sum.mean = mean;
        sum.stddev = cfg.trials > 1 ? std::sqrt(var / (cfg.trials - 1)) : 0.0;
        if (ccc && *ccc >= 2) {
            const EmpiricalBounds b = empirical_bounds(*ccc, sum.alpha);
            sum.bound_lower = b.lower;
            sum.bound_upper = b.upper;
        } else {
            sum.bound_lower = std::nan("");
            sum.bound_upper = std::nan("");
        }
        result.summary.push_back(sum);
    }
    return result;
}

} // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) { return sweep_impl(cfg, true); }

SweepResult run_sweep_serial(const ExperimentConfig& cfg) {
    return sweep_impl(cfg, false);
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
    out << "n,alpha,trial,seed,discrepancy,max_above_mean,min_below_mean,runtime_ms\n";
    for (const ResultRow& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%u,%.10g,%d,%llu,%lld,%.10g,%.10g,%.3f\n",
                      r.n, r.alpha, r.trial, static_cast<unsigned long long>(r.seed),
                      static_cast<long long>(r.discrepancy), r.max_above_mean,
                      r.min_below_mean, r.runtime_ms);
        out << buf;
    }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    emit_csv(rows, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct SvgMapper {
    double x0, x1, y1; // data ranges (y0 = 0)
    static constexpr double kW = 720, kH = 480;
    static constexpr double kL = 70, kR = 30, kT = 40, kB = 50;

    double px(double x) const {
        const double span = x1 > x0 ? x1 - x0 : 1.0;
        return kL + (x - x0) / span * (kW - kL - kR);
    }
    double py(double y) const {
        const double span = y1 > 0 ? y1 : 1.0;
        return kH - kB - y / span * (kH - kT - kB);
    }
};

void polyline(std::ostream& out, const SvgMapper& m,
              const std::vector<std::pair<double, double>>& pts, const char* color,
              bool dashed) {
    if (pts.empty()) return;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (dashed) out << " stroke-dasharray=\"6,4\"";
    out << " points=\"";
    for (const auto& [x, y] : pts) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", m.px(x), m.py(y));
        out << buf;
    }
    out << "\"/>\n";
}

} // namespace

void emit_summary_svg(const std::vector<AlphaSummary>& summary, std::ostream& out) {
    if (summary.empty()) throw std::invalid_argument("emit_summary_svg: empty summary");

    SvgMapper m{};
    m.x0 = summary.front().alpha;
    m.x1 = summary.back().alpha;
    m.y1 = 1.0;
    for (const AlphaSummary& s : summary) {
        m.y1 = std::max(m.y1, s.mean);
        if (!std::isnan(s.bound_upper)) m.y1 = std::max(m.y1, s.bound_upper);
    }
    m.y1 = std::ceil(m.y1 + 1.0);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << SvgMapper::kW
        << "\" height=\"" << SvgMapper::kH << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << SvgMapper::kW / 2
        << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
           "mean discrepancy vs alpha</text>\n";

    // axes
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  m.px(m.x0), m.py(0), m.px(m.x1), m.py(0));
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  m.px(m.x0), m.py(0), m.px(m.x0), m.py(m.y1));
    out << buf;

    for (const AlphaSummary& s : summary) { // x ticks at each alpha
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                      "font-size=\"12\">%.2g</text>\n",
                      m.px(s.alpha), m.py(0), m.px(s.alpha), m.py(0) + 5, m.px(s.alpha),
                      m.py(0) + 20, s.alpha);
        out << buf;
    }
    const int ysteps = 8;
    for (int i = 0; i <= ysteps; ++i) { // y ticks
        const double y = m.y1 * i / ysteps;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
                      "font-size=\"12\">%.3g</text>\n",
                      m.px(m.x0) - 5, m.py(y), m.px(m.x0), m.py(y), m.px(m.x0) - 8,
                      m.py(y) + 4, y);
        out << buf;
    }
    out << "<text x=\"" << (SvgMapper::kW / 2) << "\" y=\"" << (SvgMapper::kH - 12)
        << "\" text-anchor=\"middle\" font-size=\"14\">alpha</text>\n";
    out << "<text x=\"18\" y=\"" << (SvgMapper::kH / 2)
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
        << (SvgMapper::kH / 2) << ")\">discrepancy</text>\n";

    std::vector<std::pair<double, double>> mean_pts, lo_pts, hi_pts;
    for (const AlphaSummary& s : summary) {
        mean_pts.emplace_back(s.alpha, s.mean);
        if (!std::isnan(s.bound_lower)) lo_pts.emplace_back(s.alpha, s.bound_lower);
        if (!std::isnan(s.bound_upper)) hi_pts.emplace_back(s.alpha, s.bound_upper);
    }
    polyline(out, m, lo_pts, "#888888", true);
    polyline(out, m, hi_pts, "#888888", true);
    polyline(out, m, mean_pts, "#1f77b4", false);
    for (const auto& [x, y] : mean_pts) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#1f77b4\"/>\n",
                      m.px(x), m.py(y));
        out << buf;
    }
    out << "</svg>\n";
}

void emit_summary_svg(const std::vector<AlphaSummary>& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    emit_summary_svg(summary, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace smoothnet
