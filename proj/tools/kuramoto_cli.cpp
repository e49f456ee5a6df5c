// Command-line front end: solve single cases, run the synchronization test
// hierarchy, scan critical couplings, and reproduce the random-graph sweeps.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "kuramoto/case_io.hpp"
#include "kuramoto/experiments.hpp"
#include "kuramoto/random_models.hpp"
#include "kuramoto/series.hpp"
#include "kuramoto/solvers.hpp"
#include "kuramoto/sync_tests.hpp"

namespace {

using namespace kuramoto;
using nlohmann::json;

constexpr int kExitSolvedCertified = 0;
constexpr int kExitSolvedUncertified = 2;
constexpr int kExitFailed = 3;

// KURAMOTO_SEED overrides the default master seed when --seed is not given.
std::uint64_t default_seed() {
    if (const char* env = std::getenv("KURAMOTO_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 42;
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        atomic_write(out_path, text);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        atomic_write(out_path, text);
}

std::vector<double> to_std(const Vector& v) {
    return {v.data(), v.data() + v.size()};
}

GraphModel parse_model(const std::string& s) {
    if (s == "er") return GraphModel::ER;
    if (s == "rgg") return GraphModel::RGG;
    if (s == "ws") return GraphModel::WS;
    throw ParseError("unknown model \"" + s + "\" (er, rgg, ws)");
}

FreqDist parse_dist(const std::string& s) {
    if (s == "uniform") return FreqDist::Uniform;
    if (s == "bipolar") return FreqDist::Bipolar;
    throw ParseError("unknown distribution \"" + s + "\" (uniform, bipolar)");
}

json test_report_json(const SyncTestReport& r) {
    return {{"test", r.id.name()}, {"passed", r.passed}, {"lhs", r.lhs},
            {"rhs", r.rhs},        {"margin", r.margin}, {"gamma", r.gamma}};
}

struct SolveArgs {
    std::string case_path;
    std::string method = "newton";
    int order = 7;
    double tol = 1e-10;
    int max_iter = 0; // 0 = solver default
    bool auto_center = false;
    std::string out;
};

int run_solve(const SolveArgs& a) {
    CaseFile raw;
    auto [g, omega] = parse_case(a.case_path, a.auto_center, &raw);
    GraphOperators ops(g);
    const Vector eta = ops.eta(omega);
    const ConvergenceReport t0 = test_T0(ops, omega);

    json j;
    j["config"] = {{"case", a.case_path}, {"method", a.method},
                   {"order", a.order},    {"tol", a.tol},
                   {"auto_center", a.auto_center}};
    j["n"] = g.node_count();
    j["m"] = g.edge_count();
    j["contraction_test"] = {{"passed", t0.passes_T0},
                             {"eta_norm", t0.eta_norm},
                             {"pcyc_norm", t0.pcyc_norm},
                             {"bound", t0.h_of_pcyc},
                             {"gamma_star", t0.gamma_star}};

    Vector phi, x;
    bool certified = t0.passes_T0;
    if (a.method == "newton") {
        SolveOutcome o = solve_newton(ops, omega, std::nullopt, a.tol,
                                      a.max_iter > 0 ? a.max_iter : 100);
        x = o.solution;
        phi = (ops.incidence().transpose() * x).array().sin();
        j["iterations"] = o.iterations;
    } else if (a.method == "fixed-point") {
        SolveOutcome o = solve_fixed_point(ops, eta, a.tol,
                                           a.max_iter > 0 ? a.max_iter : 10000);
        phi = o.solution;
        x = recover_angles(ops, phi);
        certified = o.certified;
        j["iterations"] = o.iterations;
    } else if (a.method == "series") {
        phi = evaluate_terms(ops, eta, a.order).truncated(a.order);
        // a truncation keeps a small cycle-space component; recover the
        // nearest angles instead of rejecting it
        x = recover_angles(ops, phi, 1.0);
        j["iterations"] = (a.order + 1) / 2;
    } else {
        throw ParseError("unknown method \"" + a.method +
                         "\" (newton, fixed-point, series)");
    }

    EquivalenceReport eq = check_equivalence(ops, omega, x);
    j["solution"] = {{"x", to_std(x)}, {"phi", to_std(phi)}};
    j["residuals"] = {{"node", eq.node_residual},
                      {"flow", eq.flow_residual},
                      {"constrained", eq.constrained_residual},
                      {"membership", eq.constrained_membership},
                      {"unconstrained", eq.unconstrained_residual},
                      {"max", eq.max_mismatch}};
    j["certified"] = certified;
    const int code = certified ? kExitSolvedCertified : kExitSolvedUncertified;
    j["exit_code"] = code;
    emit(j, a.out);
    return code;
}

struct TestArgs {
    std::string case_path;
    double gamma = M_PI / 2.0;
    std::vector<int> orders{1, 3, 5, 7};
    bool auto_center = false;
    std::string out;
};

int run_test(const TestArgs& a) {
    auto [g, omega] = parse_case(a.case_path, a.auto_center);
    GraphOperators ops(g);
    const ConvergenceReport t0 = test_T0(ops, omega);

    json results = json::array();
    SyncTestReport r0;
    r0.id = {TestKind::T0, 0};
    r0.lhs = t0.eta_norm;
    r0.rhs = t0.h_of_pcyc;
    r0.passed = t0.passes_T0;
    r0.margin = r0.rhs - r0.lhs;
    r0.gamma = t0.gamma_star;
    results.push_back(test_report_json(r0));
    results.push_back(test_report_json(test_T1(ops, omega)));
    results.push_back(test_report_json(test_T2(ops, omega)));

    int max_order = 1;
    for (int k : a.orders) max_order = std::max(max_order, k);
    const SeriesExpansion se = evaluate_terms(ops, ops.eta(omega), max_order);
    for (int k : a.orders)
        results.push_back(test_report_json(test_ATk(se, k, a.gamma)));

    json j;
    j["config"] = {{"case", a.case_path}, {"gamma", a.gamma},
                   {"orders", a.orders},  {"auto_center", a.auto_center}};
    j["results"] = results;
    for (const auto& r : results)
        std::cerr << r["test"].get<std::string>() << "  "
                  << (r["passed"].get<bool>() ? "pass" : "fail")
                  << "  lhs=" << csv_double(r["lhs"].get<double>())
                  << "  rhs=" << csv_double(r["rhs"].get<double>()) << "\n";
    emit(j, a.out);
    return 0;
}

struct ScanArgs {
    std::string case_path;
    double dK = 5e-3;
    double gamma = M_PI / 2.0;
    double resolution = 1e-3;
    double K_max = 1e4;
    std::vector<int> orders{1, 3, 5, 7};
    bool no_sufficient = false;
    bool auto_center = false;
    std::string out;
};

int run_scan(const ScanArgs& a) {
    CaseFile raw;
    auto [g, omega] = parse_case(a.case_path, a.auto_center, &raw);
    GraphOperators ops(g);

    std::vector<TestId> tests;
    if (!a.no_sufficient)
        tests = {{TestKind::T0, 0}, {TestKind::T1, 0}, {TestKind::T2, 0}};
    for (int k : a.orders) tests.push_back(TestId::AT(k));

    ScanResult r = critical_ratios(ops, omega, tests, a.gamma, a.dK,
                                   a.resolution, raw.convention, a.K_max);
    json j;
    j["config"] = {{"case", a.case_path},
                   {"dK", a.dK},
                   {"gamma", a.gamma},
                   {"resolution", a.resolution},
                   {"K_max", a.K_max},
                   {"convention", raw.convention == Convention::UniformGain
                                      ? "uniform_gain"
                                      : "scaled_injection"}};
    j["K_C"] = r.K_C;
    json kt = json::object(), r1 = json::object(), r2 = json::object();
    for (const auto& [t, v] : r.K_T) {
        kt[t.name()] = v;
        r1[t.name()] = r.ratio_KT_over_KC.at(t);
        r2[t.name()] = r.ratio_KC_over_KT.at(t);
    }
    j["K_T"] = kt;
    j["ratio_KT_over_KC"] = r1;
    j["ratio_KC_over_KT"] = r2;
    emit(j, a.out);
    return 0;
}

struct SweepArgs {
    std::vector<std::string> models{"er"};
    std::vector<double> p_grid{0.2, 0.5, 0.8};
    std::vector<std::string> dists{"bipolar"};
    int trials = 30;
    int n = 20;
    double gamma = M_PI / 2.0;
    std::vector<int> orders{1, 3, 5, 7};
    bool no_sufficient = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double dK = 5e-3;
    double resolution = 1e-3;
    double K_max = 1e4;
    int threads = 0;
    std::string out;
};

SweepConfig to_config(const SweepArgs& a) {
    SweepConfig cfg;
    cfg.models.clear();
    for (const auto& m : a.models) cfg.models.push_back(parse_model(m));
    cfg.p_grid = a.p_grid;
    cfg.dists.clear();
    for (const auto& d : a.dists) cfg.dists.push_back(parse_dist(d));
    cfg.trials = a.trials;
    cfg.n = a.n;
    cfg.gamma = a.gamma;
    cfg.at_orders = a.orders;
    cfg.sufficient_tests = !a.no_sufficient;
    cfg.master_seed = a.seed_given ? a.seed : default_seed();
    cfg.dK = a.dK;
    cfg.resolution = a.resolution;
    cfg.K_max = a.K_max;
    cfg.threads = a.threads;
    return cfg;
}

int run_sweep(const SweepArgs& a) {
    const SweepConfig cfg = to_config(a);
    const std::vector<SweepRecord> records = accuracy_sweep(cfg);
    emit_text(sweep_csv(records, cfg), a.out);

    int failed = 0;
    for (const auto& r : records) failed += r.error.empty() ? 0 : 1;
    std::cerr << records.size() << " trials, " << failed
              << " skipped (seed " << cfg.master_seed << ")\n";
    return 0;
}

struct BenchArgs {
    int n = 120;
    double p = 0.8;
    int instances = 3;
    int repeats = 5;
    double eta_norm = 0.3;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out;
};

int run_bench(const BenchArgs& a) {
    const std::uint64_t master = a.seed_given ? a.seed : default_seed();
    std::vector<std::pair<WeightedGraph, Vector>> instances;
    for (int i = 0; i < a.instances; ++i) {
        const std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(i));
        WeightedGraph g = gen_graph({GraphModel::ER, a.n, a.p, WeightDist::Unit,
                                     10.0, derive_seed(s, 0)});
        GraphOperators ops(g);
        Vector omega = gen_frequencies({FreqDist::Uniform, 1.0, a.n, derive_seed(s, 1)});
        omega *= a.eta_norm / inf_norm(ops.eta(omega));
        instances.emplace_back(std::move(g), std::move(omega));
    }
    TimingResult tr = timing_bench(
        instances,
        {Method::Series5, Method::Series7, Method::FixedPoint, Method::Newton},
        a.repeats);
    emit_text(timing_csv(tr), a.out);
    return 0;
}

struct GenArgs {
    std::string model = "er";
    int n = 20;
    double p = 0.5;
    std::string weight_dist = "unit";
    std::string dist = "uniform";
    double amplitude = 1.0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string convention = "scaled_injection";
    std::string name;
    std::string out;
};

int run_gen(const GenArgs& a) {
    const std::uint64_t master = a.seed_given ? a.seed : default_seed();
    WeightDist wd;
    if (a.weight_dist == "unit")
        wd = WeightDist::Unit;
    else if (a.weight_dist == "uniform")
        wd = WeightDist::Uniform;
    else
        throw ParseError("unknown weight distribution \"" + a.weight_dist + "\"");
    Convention conv;
    if (a.convention == "scaled_injection")
        conv = Convention::ScaledInjection;
    else if (a.convention == "uniform_gain")
        conv = Convention::UniformGain;
    else
        throw ParseError("unknown convention \"" + a.convention + "\"");

    WeightedGraph g = gen_graph({parse_model(a.model), a.n, a.p, wd, 10.0,
                                 derive_seed(master, 0)});
    Vector omega = gen_frequencies({parse_dist(a.dist), a.amplitude, a.n,
                                    derive_seed(master, 1)});
    emit(case_to_json(g, omega, conv, a.name), a.out);
    return 0;
}

struct SeriesGenArgs {
    int order = 7;
    std::string format = "text";
    std::string out;
};

std::string format_factor(int part, int power, bool latex) {
    std::ostringstream s;
    if (latex) {
        s << (part == 1 ? "\\eta" : "A_{" + std::to_string(part) + "}");
        if (power > 1) s << "^{\\circ " << power << "}";
    } else {
        s << (part == 1 ? "eta" : "A" + std::to_string(part));
        if (power > 1) s << "^" << power;
    }
    return s.str();
}

std::string format_summand(const SymbolicSummand& sm, bool latex) {
    std::ostringstream s;
    const auto num = boost::multiprecision::numerator(sm.coeff);
    const auto den = boost::multiprecision::denominator(sm.coeff);
    if (latex)
        s << "\\tfrac{" << num << "}{" << den << "} ";
    else
        s << "(" << num << "/" << den << ") ";
    // collapse repeated factors of the same order into Hadamard powers
    for (std::size_t k = 0; k < sm.partition.size();) {
        std::size_t run = k;
        while (run < sm.partition.size() && sm.partition[run] == sm.partition[k]) ++run;
        if (k > 0) s << (latex ? " \\circ " : " . ");
        s << format_factor(sm.partition[k], static_cast<int>(run - k), latex);
        k = run;
    }
    return s.str();
}

int run_series_gen(const SeriesGenArgs& a) {
    const auto terms = symbolic_terms(a.order);
    std::ostringstream out;
    if (a.format == "csv") {
        out << "order,numerator,denominator,partition\n";
        for (const auto& t : terms) {
            if (t.order == 1) {
                out << "1,1,1,1\n";
                continue;
            }
            for (const auto& sm : t.summands) {
                out << t.order << ',' << boost::multiprecision::numerator(sm.coeff)
                    << ',' << boost::multiprecision::denominator(sm.coeff) << ',';
                for (std::size_t k = 0; k < sm.partition.size(); ++k)
                    out << (k ? " " : "") << sm.partition[k];
                out << '\n';
            }
        }
    } else if (a.format == "text" || a.format == "latex") {
        const bool latex = a.format == "latex";
        for (const auto& t : terms) {
            if (t.order == 1) {
                out << (latex ? "A_{1} = \\eta" : "A1 = eta") << '\n';
                continue;
            }
            if (latex)
                out << "A_{" << t.order << "} = -P_{\\mathrm{cyc}}\\left[ ";
            else
                out << "A" << t.order << " = -Pcyc[ ";
            for (std::size_t i = 0; i < t.summands.size(); ++i)
                out << (i ? " + " : "") << format_summand(t.summands[i], latex);
            out << (latex ? " \\right]" : " ]") << '\n';
        }
    } else {
        throw ParseError("unknown format \"" + a.format + "\" (text, latex, csv)");
    }
    emit_text(out.str(), a.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-synchronized states of heterogeneous oscillator "
                 "networks: series solver, test hierarchy, coupling scans"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Solve one case file");
    solve->add_option("--case", solve_args.case_path, "case JSON")->required();
    solve->add_option("--method", solve_args.method, "newton | fixed-point | series");
    solve->add_option("--order", solve_args.order, "series truncation order (odd)");
    solve->add_option("--tol", solve_args.tol, "convergence tolerance");
    solve->add_option("--max-iter", solve_args.max_iter, "iteration cap");
    solve->add_flag("--auto-center", solve_args.auto_center, "subtract mean(omega)");
    solve->add_option("--out", solve_args.out, "write JSON here (default stdout)");

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Run the synchronization test hierarchy");
    test->add_option("--case", test_args.case_path, "case JSON")->required();
    test->add_option("--gamma", test_args.gamma, "target angle for the truncation tests");
    test->add_option("--orders", test_args.orders, "truncation orders")->delimiter(',');
    test->add_flag("--auto-center", test_args.auto_center, "subtract mean(omega)");
    test->add_option("--out", test_args.out, "write JSON here (default stdout)");

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "Critical coupling and per-test thresholds");
    scan->add_option("--case", scan_args.case_path, "case JSON")->required();
    scan->add_option("--dK", scan_args.dK, "continuation step (load space)");
    scan->add_option("--gamma", scan_args.gamma, "target angle");
    scan->add_option("--resolution", scan_args.resolution, "bisection resolution");
    scan->add_option("--K-max", scan_args.K_max, "scan ceiling");
    scan->add_option("--orders", scan_args.orders, "truncation orders")->delimiter(',');
    scan->add_flag("--no-sufficient", scan_args.no_sufficient,
                   "skip the T0/T1/T2 thresholds");
    scan->add_flag("--auto-center", scan_args.auto_center, "subtract mean(omega)");
    scan->add_option("--out", scan_args.out, "write JSON here (default stdout)");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Random-graph threshold accuracy sweep");
    sweep->add_option("--model", sweep_args.models, "er | rgg | ws")->delimiter(',');
    sweep->add_option("--p", sweep_args.p_grid, "edge probability / radius / rewiring")
        ->delimiter(',');
    sweep->add_option("--dist", sweep_args.dists, "uniform | bipolar")->delimiter(',');
    sweep->add_option("--trials", sweep_args.trials, "trials per grid point");
    sweep->add_option("--n", sweep_args.n, "nodes per graph");
    sweep->add_option("--gamma", sweep_args.gamma, "target angle");
    sweep->add_option("--orders", sweep_args.orders, "truncation orders")->delimiter(',');
    sweep->add_flag("--no-sufficient", sweep_args.no_sufficient,
                    "skip the T0/T1/T2 thresholds");
    auto* sweep_seed = sweep->add_option("--seed", sweep_args.seed, "master seed");
    sweep->add_option("--dK", sweep_args.dK, "continuation step");
    sweep->add_option("--resolution", sweep_args.resolution, "bisection resolution");
    sweep->add_option("--K-max", sweep_args.K_max, "scan ceiling");
    sweep->add_option("--threads", sweep_args.threads, "worker threads (0 = auto)");
    sweep->add_option("--out", sweep_args.out, "write CSV here (default stdout)");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Time the solution methods");
    bench->add_option("--n", bench_args.n, "nodes per instance");
    bench->add_option("--p", bench_args.p, "edge probability");
    bench->add_option("--instances", bench_args.instances, "instance count");
    bench->add_option("--repeats", bench_args.repeats, "repeats per cell (median)");
    bench->add_option("--eta", bench_args.eta_norm, "target linearized-flow norm");
    auto* bench_seed = bench->add_option("--seed", bench_args.seed, "master seed");
    bench->add_option("--out", bench_args.out, "write CSV here (default stdout)");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a random case file");
    gen->add_option("--model", gen_args.model, "er | rgg | ws");
    gen->add_option("--n", gen_args.n, "nodes");
    gen->add_option("--p", gen_args.p, "edge probability / radius / rewiring");
    gen->add_option("--weights", gen_args.weight_dist, "unit | uniform");
    gen->add_option("--dist", gen_args.dist, "uniform | bipolar");
    gen->add_option("--amplitude", gen_args.amplitude, "frequency amplitude");
    auto* gen_seed = gen->add_option("--seed", gen_args.seed, "seed");
    gen->add_option("--convention", gen_args.convention,
                    "scaled_injection | uniform_gain");
    gen->add_option("--name", gen_args.name, "case name");
    gen->add_option("--out", gen_args.out, "write JSON here (default stdout)");

    SeriesGenArgs sg_args;
    auto* sg = app.add_subcommand("series-gen", "Print the symbolic expansion terms");
    sg->add_option("--order", sg_args.order, "highest odd order");
    sg->add_option("--format", sg_args.format, "text | latex | csv");
    sg->add_option("--out", sg_args.out, "write here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (test->parsed()) return run_test(test_args);
        if (scan->parsed()) return run_scan(scan_args);
        if (sweep->parsed()) {
            sweep_args.seed_given = sweep_seed->count() > 0;
            return run_sweep(sweep_args);
        }
        if (bench->parsed()) {
            bench_args.seed_given = bench_seed->count() > 0;
            return run_bench(bench_args);
        }
        if (gen->parsed()) {
            gen_args.seed_given = gen_seed->count() > 0;
            return run_gen(gen_args);
        }
        if (sg->parsed()) return run_series_gen(sg_args);
    } catch (const kuramoto::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailed;
    }
    return kExitFailed;
}
