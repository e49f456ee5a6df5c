#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kuramoto/graph.hpp"
#include "kuramoto/random_models.hpp"
#include "kuramoto/series.hpp"
#include "kuramoto/solvers.hpp"
#include "kuramoto/sync_tests.hpp"

namespace kuramoto {

struct ReferenceSolveFailed : Error { using Error::Error; };

/// S_k error curve against a Newton reference: S = ||sin(B^T x*_ref) -
/// partial sum through order k||_inf, indexed by polynomial order.
struct ErrorCurve {
    std::vector<int> orders;   // 1, 3, ..., max_order
    std::vector<double> s;     // one value per order
    double reference_residual = 0.0;
};

inline ErrorCurve error_curve(const GraphOperators& ops, const Vector& p_sd,
                              int max_order) {
    SolveOutcome ref;
    try {
        ref = solve_newton(ops, p_sd, std::nullopt, 1e-12, 200);
    } catch (const Error& e) {
        throw ReferenceSolveFailed(std::string("Newton reference failed: ") + e.what());
    }
    const Vector phi_ref = (ops.incidence().transpose() * ref.solution).array().sin();
    const SeriesExpansion se = evaluate_terms(ops, ops.eta(p_sd), max_order);

    ErrorCurve curve;
    curve.reference_residual = ref.residual_inf;
    for (int k = 1; k <= max_order; k += 2) {
        curve.orders.push_back(k);
        curve.s.push_back(inf_norm(Vector(phi_ref - se.truncated(k))));
    }
    return curve;
}

struct SweepConfig {
    std::vector<GraphModel> models{GraphModel::ER};
    std::vector<double> p_grid{0.2, 0.5, 0.8};
    std::vector<FreqDist> dists{FreqDist::Bipolar};
    int trials = 30;
    int n = 20;
    double gamma = M_PI / 2.0;
    std::vector<int> at_orders{1, 3, 5, 7};
    bool sufficient_tests = true; // also threshold T0/T1/T2
    std::uint64_t master_seed = 42;
    double dK = 5e-3;
    double resolution = 1e-3;
    double K_max = 1e4;
    int threads = 0; // 0 = hardware concurrency
};

struct SweepRecord {
    GraphModel model = GraphModel::ER;
    double p = 0.0;
    FreqDist dist = FreqDist::Bipolar;
    int trial = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int m = 0;
    double K_C = 0.0;
    std::map<TestId, double> K_T;
    std::map<TestId, double> ratio_KC_over_KT;
    std::map<TestId, double> ratio_KT_over_KC;
    std::string error; // nonempty when the instance was skipped
};

inline const char* model_name(GraphModel m) {
    switch (m) {
        case GraphModel::ER: return "er";
        case GraphModel::RGG: return "rgg";
        case GraphModel::WS: return "ws";
    }
    return "?";
}

inline const char* dist_name(FreqDist d) {
    return d == FreqDist::Uniform ? "uniform" : "bipolar";
}

/// Desk-scale rerun of the random-graph sweep protocol: uniform-gain Kuramoto
/// on unit-weight random graphs; per trial, the critical coupling by Newton
/// continuation and the per-test thresholds. Deterministic given
/// (config, master_seed); trials run under a bounded parallel map.
inline std::vector<SweepRecord> accuracy_sweep(const SweepConfig& cfg) {
    struct Task {
        GraphModel model;
        double p;
        FreqDist dist;
        int trial;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    std::uint64_t index = 0;
    for (GraphModel model : cfg.models)
        for (double p : cfg.p_grid)
            for (FreqDist dist : cfg.dists)
                for (int trial = 0; trial < cfg.trials; ++trial)
                    tasks.push_back({model, p, dist, trial,
                                     derive_seed(cfg.master_seed, index++)});

    std::vector<TestId> tests;
    if (cfg.sufficient_tests) {
        tests.push_back({TestKind::T0, 0});
        tests.push_back({TestKind::T1, 0});
        tests.push_back({TestKind::T2, 0});
    }
    for (int k : cfg.at_orders) tests.push_back(TestId::AT(k));

    auto run_one = [&](const Task& t) {
        SweepRecord rec;
        rec.model = t.model;
        rec.p = t.p;
        rec.dist = t.dist;
        rec.trial = t.trial;
        rec.seed = t.seed;
        rec.n = cfg.n;
        try {
            std::uint64_t gseed = derive_seed(t.seed, 0);
            std::uint64_t fseed = derive_seed(t.seed, 1);
            ModelSpec ms{t.model, cfg.n, t.p, WeightDist::Unit, 10.0, gseed};
            WeightedGraph g = gen_graph(ms);
            rec.m = g.edge_count();
            Vector omega = gen_frequencies({t.dist, 1.0, cfg.n, fseed});
            GraphOperators ops(g);
            ScanResult sr = critical_ratios(ops, omega, tests, cfg.gamma, cfg.dK,
                                            cfg.resolution, Convention::UniformGain,
                                            cfg.K_max);
            rec.K_C = sr.K_C;
            rec.K_T = sr.K_T;
            rec.ratio_KC_over_KT = sr.ratio_KC_over_KT;
            rec.ratio_KT_over_KC = sr.ratio_KT_over_KC;
        } catch (const Error& e) {
            rec.error = e.what();
        }
        return rec;
    };

    const int workers = cfg.threads > 0
                            ? cfg.threads
                            : std::max(1u, std::thread::hardware_concurrency());
    std::vector<SweepRecord> records(tasks.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            records[i] = run_one(tasks[i]);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return records;
}

enum class Method { Series5, Series7, FixedPoint, Newton };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Series5: return "series5";
        case Method::Series7: return "series7";
        case Method::FixedPoint: return "fixed_point";
        case Method::Newton: return "newton";
    }
    return "?";
}

struct TimingCell {
    Method method = Method::Newton;
    int instance = 0;
    double median_seconds = 0.0;
    double residual = 0.0;     // unconstrained-balance residual of the output
    bool failed = false;
    std::string error;
};

/// Time each method on each (graph, omega) instance. Shared precomputation
/// (L^+, B^T L^+, P_cyc) is excluded; precompute_seconds reports it
/// separately. Runs strictly sequential to keep the numbers quiet.
struct TimingResult {
    std::vector<TimingCell> cells;
    double precompute_seconds = 0.0;
};

inline TimingResult timing_bench(const std::vector<std::pair<WeightedGraph, Vector>>& instances,
                                 const std::vector<Method>& methods, int repeats = 5) {
    using clock = std::chrono::steady_clock;
    TimingResult result;

    std::vector<GraphOperators> ops_list;
    const auto pre0 = clock::now();
    ops_list.reserve(instances.size());
    for (const auto& [g, omega] : instances) ops_list.emplace_back(g);
    result.precompute_seconds =
        std::chrono::duration<double>(clock::now() - pre0).count();

    for (std::size_t inst = 0; inst < instances.size(); ++inst) {
        const GraphOperators& ops = ops_list[inst];
        const Vector& omega = instances[inst].second;
        const Vector eta = ops.eta(omega);
        for (Method method : methods) {
            TimingCell cell;
            cell.method = method;
            cell.instance = static_cast<int>(inst);
            std::vector<double> times;
            try {
                for (int r = 0; r < repeats; ++r) {
                    Vector phi;
                    const auto t0 = clock::now();
                    switch (method) {
                        case Method::Series5:
                            phi = evaluate_terms(ops, eta, 5).truncated(5);
                            break;
                        case Method::Series7:
                            phi = evaluate_terms(ops, eta, 7).truncated(7);
                            break;
                        case Method::FixedPoint:
                            phi = solve_fixed_point(ops, eta, 1e-10).solution;
                            break;
                        case Method::Newton: {
                            Vector x = solve_newton(ops, omega).solution;
                            phi = (ops.incidence().transpose() * x).array().sin();
                            break;
                        }
                    }
                    times.push_back(
                        std::chrono::duration<double>(clock::now() - t0).count());
                    if (r == 0)
                        cell.residual = inf_norm(residual_unconstrained(ops, eta, phi));
                }
                std::sort(times.begin(), times.end());
                cell.median_seconds = times[times.size() / 2];
            } catch (const Error& e) {
                cell.failed = true;
                cell.error = e.what();
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

} // namespace kuramoto
