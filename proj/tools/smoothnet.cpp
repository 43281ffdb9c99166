// Command-line harness: build networks, run single trials, sweep alphas,
// evaluate discrepancy bounds, and run the statistical verification checks.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smoothnet/engine.hpp"
#include "smoothnet/experiment.hpp"
#include "smoothnet/perturbation.hpp"
#include "smoothnet/schedule.hpp"
#include "smoothnet/spectral.hpp"
#include "smoothnet/verification.hpp"

using namespace smoothnet;

namespace {

struct NetworkFlags {
    int ccc_log_n = 0;
    std::string orient = "up";
    std::uint64_t orient_seed = 1;
    std::string schedule_path;
    std::string periodic_path;
    int periods = 1;

    void add_to(CLI::App* cmd, bool need_one = true) {
        auto* a = cmd->add_option("--ccc", ccc_log_n, "CCC network with 2^LOGN wires")
                      ->type_name("LOGN");
        auto* b = cmd->add_option("--schedule", schedule_path, "schedule file");
        auto* c = cmd->add_option("--periodic", periodic_path,
                                  "round file repeated --periods times");
        cmd->add_option("--periods", periods, "periods for --periodic");
        cmd->add_option("--orient", orient, "CCC orientation: up|down|random")
            ->check(CLI::IsMember({"up", "down", "random"}));
        cmd->add_option("--orient-seed", orient_seed, "seed for --orient random");
        a->excludes(b)->excludes(c);
        b->excludes(c);
        if (need_one) {
            cmd->callback([this, cmd]() {
                if (cmd->count("--ccc") + cmd->count("--schedule") +
                        cmd->count("--periodic") ==
                    0)
                    throw CLI::ValidationError(
                        "need one of --ccc, --schedule, --periodic");
            });
        }
    }

    NetworkSpec spec(CLI::App* cmd) const {
        NetworkSpec s;
        if (cmd->count("--ccc")) {
            s.kind = NetworkSpec::Kind::Ccc;
            s.log_n = ccc_log_n;
            if (orient == "up") s.orient = CccOrientation::AllUp;
            else if (orient == "down") s.orient = CccOrientation::AllDown;
            else {
                s.orient = CccOrientation::PerBalancerList;
                s.orient_seed = orient_seed;
            }
        } else if (cmd->count("--schedule")) {
            s.kind = NetworkSpec::Kind::ScheduleFile;
            s.path = schedule_path;
        } else {
            s.kind = NetworkSpec::Kind::PeriodicFile;
            s.path = periodic_path;
            s.periods = periods;
        }
        return s;
    }
};

InputDist parse_input(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "uniform") return InputDist::uniform(arg.empty() ? 0 : std::stoll(arg));
    if (kind == "constant") return InputDist::constant(std::stoll(arg));
    if (kind == "single") return InputDist::single_hot(std::stoll(arg));
    if (kind == "file") return InputDist::from_file(arg);
    throw CLI::ValidationError("bad --input, expected uniform[:m]|constant:c|single:K|file:path");
}

std::vector<double> parse_alphas(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) { // start:stop:step
        double start = 0, stop = 0, step = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
            step <= 0)
            throw CLI::ValidationError("bad --alpha range, expected start:stop:step");
        for (double a = start; a <= stop + 1e-12; a += step)
            out.push_back(std::min(a, stop));
    } else {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("no alpha values given");
    return out;
}

int cmd_build(const NetworkFlags& net, CLI::App* cmd, const std::string& out_path) {
    const Schedule s = build_network(net.spec(cmd));
    save_schedule(s, out_path);
    std::cout << "wrote " << out_path << " (n=" << s.n() << " T=" << s.num_rounds()
              << " balancers=" << s.balancer_count() << ")\n";
    return 0;
}

int cmd_run(const NetworkFlags& net, CLI::App* cmd, double alpha, std::uint64_t seed,
            const std::string& input_text, const std::string& ideal_mode,
            const std::string& trace_csv, const std::string& loads_out,
            const std::string& flips_hex) {
    const Schedule s = build_network(net.spec(cmd));
    Rng input_rng(seed);
    const LoadVector input = sample_input(parse_input(input_text), s.n(), input_rng);
    const PerturbationPlan plan = sample_plan(s, alpha, seed + 1);

    RunTrace trace;
    const bool want_trace = !trace_csv.empty();
    const LoadVector out =
        run_discrete(s, plan, input, RunOptions{.trace = want_trace}, &trace);

    std::int64_t total = 0;
    for (std::int64_t x : input) total += x;
    const double mu = static_cast<double>(total) / s.n();
    std::cout << "n=" << s.n() << " T=" << s.num_rounds() << " alpha=" << alpha
              << " seed=" << seed << "\n";
    std::cout << "input discrepancy=" << discrepancy(input) << " mu=" << mu << "\n";
    std::cout << "output discrepancy=" << discrepancy(out) << "\n";

    IdealMode mode = IdealMode::Float;
    if (ideal_mode == "exact" ||
        (ideal_mode == "auto" && s.n() <= 1024 && s.num_rounds() <= 62))
        mode = IdealMode::ExactDyadic;
    try {
        const IdealVector ideal = run_ideal(s, input, mode);
        double dev = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            dev = std::max(dev, std::abs(static_cast<double>(out[i]) - ideal.value(i)));
        std::cout << "ideal discrepancy=" << discrepancy(ideal)
                  << " max|y-ideal|=" << dev << "\n";
    } catch (const ExactOverflowError& e) {
        std::cout << "ideal skipped: " << e.what() << "\n";
    }

    if (want_trace) {
        std::ofstream f(trace_csv);
        write_trace_csv(s, plan, trace, f);
        std::cout << "trace written to " << trace_csv << "\n";
    }
    if (!loads_out.empty()) {
        save_loads(out, loads_out);
        std::cout << "loads written to " << loads_out << "\n";
    }
    if (!flips_hex.empty()) {
        std::ofstream f(flips_hex);
        dump_flips_hex(plan, f);
        std::cout << "flip bits written to " << flips_hex << "\n";
    }
    return 0;
}

int cmd_sweep(const NetworkFlags& net, CLI::App* cmd, const std::string& alpha_text,
              int trials, const std::string& input_text, std::uint64_t seed,
              const std::string& out_csv, const std::string& out_svg, bool serial) {
    ExperimentConfig cfg;
    cfg.network = net.spec(cmd);
    cfg.alphas = parse_alphas(alpha_text);
    cfg.trials = trials;
    cfg.input = parse_input(input_text);
    cfg.base_seed = seed;

    const SweepResult result = serial ? run_sweep_serial(cfg) : run_sweep(cfg);
    if (!out_csv.empty()) emit_csv(result.rows, out_csv);
    if (!out_svg.empty()) emit_summary_svg(result.summary, out_svg);

    std::cout << "alpha,mean,stddev,bound_lower,bound_upper\n";
    for (const AlphaSummary& s : result.summary) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.10g,%.4f,%.4f,%.4f,%.4f\n", s.alpha, s.mean,
                      s.stddev, s.bound_lower, s.bound_upper);
        std::cout << buf;
    }
    return 0;
}

int print_report(const BoundReport& r) {
    std::cout << r.to_kv() << "\n";
    std::cout << BoundReport::csv_header() << "\n" << r.csv_row() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"token-balancing network simulator and bound calculator"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "construct a network and write it to a file");
    NetworkFlags build_net;
    build_net.add_to(build);
    std::string build_out;
    build->add_option("--out", build_out, "output schedule file")->required();

    // run
    auto* run = app.add_subcommand("run", "run one trial verbosely");
    NetworkFlags run_net;
    run_net.add_to(run);
    double run_alpha = 0.0;
    std::uint64_t run_seed = 0;
    std::string run_input = "uniform", run_ideal_mode = "auto";
    std::string run_trace_csv, run_loads_out, run_flips_hex;
    run->add_option("--alpha", run_alpha, "flip probability")->check(CLI::Range(0.0, 1.0));
    run->add_option("--seed", run_seed, "random seed");
    run->add_option("--input", run_input, "uniform[:m]|constant:c|single:K|file:path");
    run->add_option("--ideal", run_ideal_mode,
                    "ideal comparator mode (auto: exact up to n=1024, T=62)")
        ->check(CLI::IsMember({"auto", "exact", "float"}));
    run->add_option("--trace-csv", run_trace_csv, "write per-balancer trace CSV");
    run->add_option("--loads-out", run_loads_out, "write final loads");
    run->add_option("--flips-hex", run_flips_hex, "write flip bits as hex lines");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "alpha sweep with CSV/SVG output");
    NetworkFlags sweep_net;
    sweep_net.add_to(sweep);
    std::string sweep_alpha = "0:0.5:0.1", sweep_input = "uniform";
    int sweep_trials = 100;
    std::uint64_t sweep_seed = 0;
    std::string sweep_csv, sweep_svg;
    bool sweep_serial = false;
    sweep->add_option("--alpha", sweep_alpha, "alpha list or start:stop:step range");
    sweep->add_option("--trials", sweep_trials, "trials per alpha")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--input", sweep_input, "uniform[:m]|constant:c|single:K|file:path");
    sweep->add_option("--seed", sweep_seed, "base seed");
    sweep->add_option("--out", sweep_csv, "result CSV path");
    sweep->add_option("--svg", sweep_svg, "summary SVG path");
    sweep->add_flag("--serial", sweep_serial, "force the serial reference path");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "evaluate discrepancy bounds");
    bounds->require_subcommand(1);

    auto* th1 = bounds->add_subcommand("theorem1", "general upper bound for a schedule");
    NetworkFlags th1_net;
    th1_net.add_to(th1);
    double th1_alpha = 0.0, th1_k = -1.0;
    std::size_t th1_t1 = 0, th1_t2 = 0;
    th1->add_option("--alpha", th1_alpha)->check(CLI::Range(0.0, 1.0));
    th1->add_option("--t1", th1_t1, "probabilistic prefix length (default: auto)");
    th1->add_option("--t2", th1_t2, "evaluation round (default: last)");
    th1->add_option("--K", th1_k, "initial discrepancy (default: n)");

    auto* per = bounds->add_subcommand("periodic", "bound for a repeated round file");
    std::string per_round_path;
    double per_alpha = 0.0, per_k = -1.0;
    per->add_option("--round", per_round_path, "round schedule file")->required();
    per->add_option("--alpha", per_alpha)->check(CLI::Range(0.0, 1.0));
    per->add_option("--K", per_k, "initial discrepancy (default: n)");

    auto* low = bounds->add_subcommand("ccc-lower", "all-up CCC lower bound");
    int low_log_n = 16;
    double low_alpha = 0.0;
    low->add_option("--log-n", low_log_n)->required();
    low->add_option("--alpha", low_alpha)->check(CLI::Range(0.0, 0.5));

    auto* emp = bounds->add_subcommand("empirical", "expected-discrepancy corridor");
    int emp_log_n = 16;
    double emp_alpha = 0.0;
    emp->add_option("--log-n", emp_log_n)->required();
    emp->add_option("--alpha", emp_alpha)->check(CLI::Range(0.0, 1.0));

    // verify
    auto* verify = app.add_subcommand("verify", "statistical / exact structure checks");
    verify->require_subcommand(1);

    auto* lem = verify->add_subcommand("lemma3", "odd indicators are fair coins");
    NetworkFlags lem_net;
    lem_net.add_to(lem);
    std::uint64_t lem_trials = 20000, lem_seed = 1;
    double lem_tol = 0.015;
    std::string lem_detail_csv;
    lem->add_option("--trials", lem_trials);
    lem->add_option("--seed", lem_seed);
    lem->add_option("--tolerance", lem_tol);
    lem->add_option("--detail-csv", lem_detail_csv, "per-balancer statistics CSV");

    auto* ind = verify->add_subcommand("independence", "odd indicators decorrelate");
    NetworkFlags ind_net;
    ind_net.add_to(ind);
    std::uint32_t ind_wire = 0;
    std::uint64_t ind_trials = 20000, ind_seed = 1;
    double ind_thresh = 0.03;
    std::size_t ind_pairs = 500;
    bool ind_triples = false;
    ind->add_option("--wire", ind_wire);
    ind->add_option("--trials", ind_trials);
    ind->add_option("--seed", ind_seed);
    ind->add_option("--threshold", ind_thresh);
    ind->add_option("--max-pairs", ind_pairs);
    ind->add_flag("--triples", ind_triples, "also check third-order joint frequencies");

    auto* eq3 = verify->add_subcommand("eq3", "trace unfolding equals y - ideal exactly");
    std::uint32_t eq3_n = 16;
    std::size_t eq3_rounds = 8, eq3_cases = 100;
    std::uint64_t eq3_seed = 1;
    eq3->add_option("--n", eq3_n, "max vertices");
    eq3->add_option("--rounds", eq3_rounds, "max rounds");
    eq3->add_option("--cases", eq3_cases);
    eq3->add_option("--seed", eq3_seed);

    auto* cs = verify->add_subcommand("ccc-structure", "tail products and decomposition");
    int cs_log_n = 4;
    cs->add_option("--log-n", cs_log_n)->check(CLI::Range(1, 8));

    auto* rem = verify->add_subcommand("remark2", "flip-all/(1-alpha) symmetry");
    NetworkFlags rem_net;
    rem_net.add_to(rem);
    double rem_alpha = 0.3;
    std::uint64_t rem_trials = 10000, rem_seed = 1;
    rem->add_option("--alpha", rem_alpha)->check(CLI::Range(0.0, 1.0));
    rem->add_option("--trials", rem_trials);
    rem->add_option("--seed", rem_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (build->parsed()) return cmd_build(build_net, build, build_out);
        if (run->parsed())
            return cmd_run(run_net, run, run_alpha, run_seed, run_input, run_ideal_mode,
                           run_trace_csv, run_loads_out, run_flips_hex);
        if (sweep->parsed())
            return cmd_sweep(sweep_net, sweep, sweep_alpha, sweep_trials, sweep_input,
                             sweep_seed, sweep_csv, sweep_svg, sweep_serial);

        if (th1->parsed()) {
            const Schedule s = build_network(th1_net.spec(th1));
            std::size_t t2 = th1->count("--t2") ? th1_t2 : s.num_rounds();
            std::size_t t1 = th1_t1;
            if (!th1->count("--t1")) {
                const double gap = std::ceil(std::log2(std::log2(std::max<double>(s.n(), 4))));
                t1 = t2 > static_cast<std::size_t>(gap) ? t2 - static_cast<std::size_t>(gap)
                                                        : 0;
            }
            const double k = th1_k >= 0 ? th1_k : static_cast<double>(s.n());
            return print_report(theorem1_bound(s, th1_alpha, t1, t2, k));
        }
        if (per->parsed()) {
            const Schedule round = load_schedule(per_round_path);
            const double k = per_k >= 0 ? per_k : static_cast<double>(round.n());
            const PeriodicBound pb =
                periodic_bound(round.n(), round.rounds(), per_alpha, k);
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "d=%zu periods=%zu T=%zu lambda_q=%.10g lambda1_cap=%.10g "
                          "lambda2_cap=%.10g",
                          pb.round_length, pb.periods, pb.rounds_total, pb.lambda_q,
                          pb.lambda1_cap, pb.lambda2_cap);
            std::cout << buf << "\n";
            return print_report(pb.report);
        }
        if (low->parsed()) {
            std::cout << "ccc_lower_bound=" << ccc_lower_bound(low_log_n, low_alpha)
                      << "\n";
            return 0;
        }
        if (emp->parsed()) {
            const EmpiricalBounds b = empirical_bounds(emp_log_n, emp_alpha);
            std::cout << "lower=" << b.lower << " upper=" << b.upper << "\n";
            return 0;
        }

        if (lem->parsed()) {
            const Schedule s = build_network(lem_net.spec(lem));
            VerificationReport rep = verify_odd_half(s, lem_trials, lem_seed, lem_tol);
            std::cout << rep.one_line() << "\n";
            if (!lem_detail_csv.empty()) {
                const OddStats stats =
                    collect_odd_stats(s, lem_trials, lem_seed, InputDist::uniform());
                std::ofstream f(lem_detail_csv);
                write_odd_stats_csv(s, stats, f);
            }
            return rep.pass ? 0 : 1;
        }
        if (ind->parsed()) {
            const Schedule s = build_network(ind_net.spec(ind));
            VerificationReport rep =
                verify_odd_independence(s, ind_wire, ind_trials, ind_seed, ind_thresh,
                                        ind_pairs, nullptr, ind_triples);
            std::cout << rep.one_line() << "\n";
            return rep.pass ? 0 : 1;
        }
        if (eq3->parsed()) {
            VerificationReport rep =
                verify_eq3_identity(eq3_n, eq3_rounds, eq3_cases, eq3_seed);
            std::cout << rep.one_line() << "\n";
            return rep.pass ? 0 : 1;
        }
        if (cs->parsed()) {
            VerificationReport rep = verify_ccc_structure(cs_log_n);
            std::cout << rep.one_line() << "\n";
            return rep.pass ? 0 : 1;
        }
        if (rem->parsed()) {
            const Schedule s = build_network(rem_net.spec(rem));
            VerificationReport rep =
                verify_remark2_symmetry(s, rem_alpha, rem_trials, rem_seed);
            std::cout << rep.one_line() << "\n";
            return rep.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
