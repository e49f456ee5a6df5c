// End-to-end acceptance checks. Each numbered check prints one PASS/FAIL
// line; the process exits nonzero if any check fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kuramoto/case_io.hpp"
#include "kuramoto/experiments.hpp"
#include "kuramoto/random_models.hpp"
#include "kuramoto/series.hpp"
#include "kuramoto/solvers.hpp"
#include "kuramoto/sync_tests.hpp"

using namespace kuramoto;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

WeightedGraph random_tree(int n, std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    std::vector<Edge> edges;
    for (int k = 1; k < n; ++k) {
        const int parent = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(k)));
        edges.push_back({parent, k, 0.2 + 9.8 * rng.uniform01()});
    }
    return WeightedGraph(n, std::move(edges));
}

Vector scaled_omega(const GraphOperators& ops, double target, std::uint64_t seed) {
    Vector omega = gen_frequencies(
        {FreqDist::Uniform, 1.0, ops.graph().node_count(), seed});
    return omega * (target / inf_norm(ops.eta(omega)));
}

// 1. Projection algebra over 100 seeded ER graphs, with a runtime budget.
Outcome check_projection_suite() {
    const double t0 = now_seconds();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int n = 5 + static_cast<int>(seed % 26); // up to 30
        WeightedGraph g = gen_graph({GraphModel::ER, n, 0.4,
                                     seed % 2 ? WeightDist::Uniform : WeightDist::Unit,
                                     10.0, seed});
        GraphOperators ops(g);
        const int m = g.edge_count();
        const Matrix id = Matrix::Identity(m, m);
        const Matrix bt = g.incidence().transpose();
        if (inf_norm(Matrix(ops.p_cut() * ops.p_cut() - ops.p_cut())) > 1e-9)
            return {false, "P_cut not idempotent at seed " + std::to_string(seed)};
        if (inf_norm(Matrix(ops.p_cut() + ops.p_cyc() - id)) > 1e-9)
            return {false, "P_cut + P_cyc != I at seed " + std::to_string(seed)};
        if (inf_norm(Matrix(ops.p_cut() * bt - bt)) > 1e-9)
            return {false, "P_cut not identity on Img(B^T) at seed " + std::to_string(seed)};
        if (inf_norm(Matrix(ops.p_cyc() * bt)) > 1e-9)
            return {false, "P_cyc does not kill Img(B^T) at seed " + std::to_string(seed)};

        Eigen::EigenSolver<Matrix> es(ops.p_cut());
        int at_one = 0, at_zero = 0;
        for (int k = 0; k < m; ++k) {
            const std::complex<double> lam = es.eigenvalues()(k);
            if (std::abs(lam - 1.0) < 1e-6) ++at_one;
            if (std::abs(lam) < 1e-6) ++at_zero;
        }
        if (at_one != n - 1 || at_zero != m - n + 1)
            return {false, "eigenvalue multiplicities (" + std::to_string(at_one) + "," +
                               std::to_string(at_zero) + ") != (" + std::to_string(n - 1) +
                               "," + std::to_string(m - n + 1) + ") at seed " +
                               std::to_string(seed)};
    }
    const double elapsed = now_seconds() - t0;
    if (elapsed >= 30.0)
        return {false, "runtime " + std::to_string(elapsed) + " s >= 30 s"};
    char buf[64];
    std::snprintf(buf, sizeof(buf), "100 graphs in %.1f s", elapsed);
    return {true, buf};
}

// 2. The epsilon 3-cycle: closed-form cycle projection and its blow-up.
// The published matrix [[eps,eps,eps],[eps,eps,eps],[1-2eps,...]] is only the
// first-order-in-eps form: the exact projection for weights (1, 1, eps) is
// u z^T / (z^T u) with cycle vector z and u = A^{-1} z, whose entry
// magnitudes are eps/(1+2eps) and 1/(1+2eps). (Decisive: the projection's
// image must be A^{-1} Ker(B) = span(1, -1, 1/eps), but the published
// matrix's image is span(1, 1, 1/eps - 2).) The check verifies the exact
// closed form to 1e-12 and measures the published form's O(eps^2) defect;
// the literal entrywise-1e-12 clause against the published matrix is
// mathematically unattainable and is reported as the failure it is.
Outcome check_eps_cycle() {
    std::ostringstream detail;
    bool published_exact = true;
    for (double eps : {0.1, 0.01, 0.001}) {
        WeightedGraph g(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, eps}});
        GraphOperators ops(g);
        const double e = eps / (1.0 + 2.0 * eps);
        Matrix exact(3, 3);
        exact << e, -e, e, -e, e, -e, 1 - 2 * e, 2 * e - 1, 1 - 2 * e;
        if ((ops.p_cyc() - exact).cwiseAbs().maxCoeff() > 1e-12)
            return {false, "computed P_cyc differs from the exact closed form at eps = " +
                               std::to_string(eps)};
        Matrix published(3, 3);
        published << eps, eps, eps, eps, eps, eps, 1 - 2 * eps, 1 - 2 * eps,
            1 - 2 * eps;
        const double dev = (ops.p_cyc().cwiseAbs() - published).cwiseAbs().maxCoeff();
        if (dev > 1e-12) published_exact = false;
        detail << " eps=" << eps << " |published - exact| = " << dev << " (~4 eps^2);";
        if (eps == 0.001 && (ops.pcyc_inf_norm() < 2.99 || ops.pcyc_inf_norm() > 3.01))
            return {false, "||P_cyc(0.001)||_inf = " + std::to_string(ops.pcyc_inf_norm())};
    }
    if (published_exact)
        return {true, "published matrix reproduced entrywise to 1e-12"};
    return {false,
            "computed P_cyc matches the exact closed form (entries eps/(1+2eps), "
            "1/(1+2eps)) to 1e-12 and ||P_cyc(0.001)||_inf = 2.994 is in "
            "[2.99, 3.01], but the published entrywise form is a first-order "
            "simplification and cannot be matched to 1e-12:" +
                detail.str() +
                " the published matrix is exact only under the reparameterized "
                "third weight eps/(1-2eps)"};
}

// 3. Symbolic coefficients for orders 3, 5, 7 against the published
// expansion, with the order-5 cross term arbitrated numerically.
Outcome check_symbolic_coefficients() {
    const auto terms = symbolic_terms(7);
    auto coeff = [&](int order, std::vector<int> part) -> Rational {
        for (const auto& t : terms)
            if (t.order == order)
                for (const auto& s : t.summands)
                    if (s.partition == part) return s.coeff;
        return Rational(0);
    };
    if (coeff(3, {1, 1, 1}) != Rational(1, 6)) return {false, "order-3 coefficient != 1/6"};
    if (coeff(5, {1, 1, 1, 1, 1}) != Rational(3, 40))
        return {false, "order-5 eta^5 coefficient != 3/40"};
    if (coeff(7, {1, 1, 1, 1, 1, 1, 1}) != Rational(5, 112) ||
        coeff(7, {3, 1, 1, 1, 1}) != Rational(3, 8) ||
        coeff(7, {3, 3, 1}) != Rational(1, 2) || coeff(7, {5, 1, 1}) != Rational(1, 2))
        return {false, "order-7 coefficients != {5/112, 3/8, 1/2, 1/2}"};

    // Order-5 cross term: the recursion collects 3 placements x 1/6 = 1/2 on
    // A3 o eta^2 where the published text prints 1/12. Arbitrate with the
    // scalar commuting case P = 1, where the exact inverse is sin: the
    // order-5 coefficient of the inverse must be 1/120.
    const Rational cross = coeff(5, {3, 1, 1});
    const Rational a5_ours = -(cross * Rational(-1, 6) + Rational(3, 40));
    const Rational a5_printed = -(Rational(1, 12) * Rational(-1, 6) + Rational(3, 40));
    if (a5_ours != Rational(1, 120))
        return {false, "collapsed order-5 coefficient " + a5_ours.str() + " != 1/120"};
    if (a5_printed == Rational(1, 120))
        return {false, "unexpected: the 1/12 variant also inverts"};

    // the same arbitration numerically, on 20 random eta over a real cycle
    // space: our A5 keeps the order-7 inversion residual, the 1/12 variant
    // breaks it at O(eta^5)
    WeightedGraph g = gen_graph({GraphModel::ER, 8, 0.6, WeightDist::Unit, 10.0, 33});
    GraphOperators ops(g);
    Xoshiro256pp rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        Vector eta(g.edge_count());
        for (int k = 0; k < eta.size(); ++k) eta(k) = 0.1 * (rng.uniform01() - 0.5);
        const SeriesExpansion se = evaluate_terms(ops, eta, 5);
        Vector eta3 = eta.cwiseProduct(eta).cwiseProduct(eta);
        Vector a3 = -(ops.p_cyc() * Vector((1.0 / 6.0) * eta3));
        Vector e2 = eta.cwiseProduct(eta);
        Vector a5_direct = -(ops.p_cyc() *
                             Vector(0.5 * a3.cwiseProduct(e2) +
                                    (3.0 / 40.0) * eta3.cwiseProduct(e2)));
        if (inf_norm(Vector(se.terms[2] - a5_direct)) > 1e-12)
            return {false, "generator disagrees with the direct 1/2-variant formula"};
        Vector a5_printed_direct =
            -(ops.p_cyc() * Vector((1.0 / 12.0) * a3.cwiseProduct(e2) +
                                   (3.0 / 40.0) * eta3.cwiseProduct(e2)));
        const double defect =
            inf_norm(residual_unconstrained(ops, eta, Vector(eta + a3 + a5_direct))) ;
        const double defect_printed = inf_norm(residual_unconstrained(
            ops, eta, Vector(eta + a3 + a5_printed_direct)));
        // residual after the corrected order 5 is O(eta^7), the 1/12 variant
        // leaves an O(eta^5) defect
        if (inf_norm(Vector(a5_direct - a5_printed_direct)) > 1e-15 &&
            defect >= defect_printed)
            return {false, "inversion oracle does not favor the 1/2 variant"};
    }
    return {true,
            "orders 3 and 7 exact; order-5 eta^5 term 3/40 exact; order-5 cross term "
            "collects to 1/2 where the published text prints 1/12 -- the 1/2 value is "
            "the one consistent with the recursion (scalar commuting case yields the "
            "sine coefficient 1/120; the 1/12 variant gives -11/180) and with the "
            "numeric inversion oracle; discrepancy reported, not absorbed"};
}

// 4. Trees: order-1 exactness and the closed-form angle recovery.
Outcome check_acyclic_exactness() {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const int n = 3 + static_cast<int>(seed % 48); // up to 50
        WeightedGraph g = random_tree(n, 1000 + seed);
        GraphOperators ops(g);
        Vector omega = scaled_omega(ops, 0.85, seed);
        SolveOutcome nw = solve_newton(ops, omega, std::nullopt, 1e-12, 200);
        Vector phi_nw = (ops.incidence().transpose() * nw.solution).array().sin();

        const SeriesExpansion se = evaluate_terms(ops, ops.eta(omega), 9);
        if (inf_norm(Vector(se.truncated(1) - phi_nw)) > 1e-8)
            return {false, "order-1 series != Newton edge sines at seed " +
                               std::to_string(seed)};
        for (std::size_t i = 1; i < se.terms.size(); ++i)
            if (inf_norm(se.terms[i]) >= 1e-12)
                return {false, "nonzero higher term at seed " + std::to_string(seed)};

        Vector x_closed = ops.laplacian_pinv() * ops.incidence() *
                          ops.weights().asDiagonal() *
                          Vector(ops.eta(omega).array().asin().matrix());
        x_closed.array() -= x_closed.mean();
        Vector x_nw = nw.solution;
        x_nw.array() -= x_nw.mean();
        if (inf_norm(Vector(x_closed - x_nw)) > 1e-8)
            return {false, "closed-form angles != Newton at seed " + std::to_string(seed)};
    }
    return {true, "50 trees, order-1 exact, higher terms < 1e-12"};
}

// 5. The four balance transcriptions agree at the solution.
Outcome check_equivalence_suite() {
    int done = 0;
    for (std::uint64_t seed = 0; done < 50 && seed < 400; ++seed) {
        const int n = 4 + static_cast<int>(seed % 17); // up to 20
        WeightedGraph g = gen_graph({GraphModel::ER, n, 0.5, WeightDist::Unit, 10.0,
                                     2000 + seed});
        if (g.acyclic()) continue;
        GraphOperators ops(g);
        Vector omega = scaled_omega(ops, 0.8 * h_fn(ops.pcyc_inf_norm()), seed);
        if (!test_T0(ops, omega).passes_T0) continue;
        ++done;
        Vector x = solve_newton(ops, omega, std::nullopt, 1e-12, 200).solution;
        EquivalenceReport rep = check_equivalence(ops, omega, x);
        if (rep.max_mismatch >= 1e-8)
            return {false, "max mismatch " + std::to_string(rep.max_mismatch) +
                               " at seed " + std::to_string(seed)};
        Vector phi = (ops.incidence().transpose() * x).array().sin();
        Vector x_rec = recover_angles(ops, phi);
        Vector x_c = x;
        x_c.array() -= x_c.mean();
        if (inf_norm(Vector(x_rec - x_c)) >= 1e-8)
            return {false, "angle recovery mismatch at seed " + std::to_string(seed)};
    }
    if (done < 50) return {false, "only " + std::to_string(done) + " usable instances"};
    return {true, "50 cyclic instances, mismatch < 1e-8"};
}

// 6. Error-curve shape in the strongly convergent regime.
Outcome check_series_convergence() {
    int done = 0;
    for (std::uint64_t seed = 0; done < 10 && seed < 60; ++seed) {
        const int n = 6 + static_cast<int>(seed % 10);
        WeightedGraph g = gen_graph({GraphModel::ER, n, 0.5, WeightDist::Unit, 10.0,
                                     3000 + seed});
        if (g.acyclic()) continue;
        GraphOperators ops(g);
        // margin of at least 2x against the convergence bound
        Vector omega = scaled_omega(ops, 0.35 * h_fn(ops.pcyc_inf_norm()), seed);
        if (!test_T0(ops, omega).passes_T0) continue;
        ++done;
        ErrorCurve curve = error_curve(ops, omega, 13);
        for (std::size_t i = 1; i < curve.s.size(); ++i)
            if (curve.s[i] >= curve.s[i - 1] && curve.s[i - 1] > 1e-10)
                return {false, "S_k not strictly decreasing above the 1e-10 floor at seed " +
                                   std::to_string(seed)};
        const Vector phi13 = evaluate_terms(ops, ops.eta(omega), 13).truncated(13);
        const double resid = inf_norm(residual_unconstrained(ops, ops.eta(omega), phi13));
        if (resid >= 1e-6)
            return {false, "order-13 residual " + std::to_string(resid) + " at seed " +
                               std::to_string(seed)};
    }
    if (done < 10) return {false, "only " + std::to_string(done) + " usable instances"};
    return {true, "10 instances, monotone S_k, order-13 residual < 1e-6"};
}

// 7. The exact tests are sufficient: no threshold beyond the scanned K_C.
Outcome check_soundness() {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const int n = 6 + static_cast<int>(seed % 7);
        WeightedGraph g = gen_graph({GraphModel::ER, n, 0.5, WeightDist::Unit, 10.0,
                                     4000 + seed});
        GraphOperators ops(g);
        Vector p = scaled_omega(ops, 0.6, 40 + seed);
        ScanResult sc = scan_K_C(ops, p, 5e-3, M_PI / 2.0,
                                 Convention::ScaledInjection, 50.0, 1e-3);
        if (std::isinf(sc.K_C)) continue;
        for (TestId t : {TestId{TestKind::T0, 0}, TestId{TestKind::T1, 0},
                         TestId{TestKind::T2, 0}}) {
            double kt;
            try {
                kt = threshold_K_T(ops, p, t);
            } catch (const TestNeverFails&) {
                continue;
            }
            if (kt > sc.K_C + 1e-3 + 1e-9)
                return {false, t.name() + " threshold " + std::to_string(kt) +
                                   " exceeds K_C " + std::to_string(sc.K_C) +
                                   " at seed " + std::to_string(seed)};
            ++checked;
        }
    }
    if (checked == 0) return {false, "no instance produced a finite K_C"};
    return {true, std::to_string(checked) + " thresholds within resolution of K_C"};
}

// 8 and 11 share one sweep configuration.
SweepConfig trend_config() {
    SweepConfig cfg;
    cfg.models = {GraphModel::ER};
    cfg.p_grid = {0.2, 0.5, 0.8};
    cfg.dists = {FreqDist::Bipolar};
    cfg.trials = 30;
    cfg.n = 20;
    cfg.at_orders = {1, 3, 5, 7};
    cfg.sufficient_tests = false;
    cfg.master_seed = 42;
    return cfg;
}

// 8. Accuracy trend of the truncation tests on random graphs.
Outcome check_accuracy_trend(const std::vector<SweepRecord>& records) {
    const std::vector<int> orders{1, 3, 5, 7};
    int improving_points = 0;
    double at7_sum = 0.0;
    int at7_count = 0;
    std::ostringstream detail;
    for (double p : {0.2, 0.5, 0.8}) {
        std::vector<double> mean_dev(orders.size(), 0.0);
        int count = 0;
        for (const auto& r : records) {
            if (r.p != p || !r.error.empty()) continue;
            ++count;
            for (std::size_t k = 0; k < orders.size(); ++k) {
                const double ratio = r.ratio_KC_over_KT.at(TestId::AT(orders[k]));
                mean_dev[k] += std::abs(1.0 - ratio);
                if (orders[k] == 7) {
                    at7_sum += ratio;
                    ++at7_count;
                }
            }
        }
        if (count == 0) return {false, "no usable trials at p = " + std::to_string(p)};
        for (double& d : mean_dev) d /= count;
        bool non_increasing = true;
        for (std::size_t k = 1; k < mean_dev.size(); ++k)
            non_increasing = non_increasing && mean_dev[k] <= mean_dev[k - 1] + 1e-12;
        improving_points += non_increasing ? 1 : 0;
        detail << " p=" << p << " dev(AT1..AT7)=";
        for (double d : mean_dev) detail << d << " ";
    }
    const double at7_mean = at7_sum / at7_count;
    detail << " mean(K_C/K_AT7)=" << at7_mean;
    if (improving_points < 2)
        return {false, "trend non-increasing at only " + std::to_string(improving_points) +
                           "/3 p-points;" + detail.str()};
    if (at7_mean < 0.9 || at7_mean > 1.1)
        return {false, "AT7 mean ratio " + std::to_string(at7_mean) + " outside [0.9, 1.1]"};
    return {true, std::to_string(improving_points) + "/3 p-points non-increasing;" +
                      detail.str()};
}

// 9. Scalar gap functions.
Outcome check_gap_functions() {
    for (int k = 0; k < 100; ++k) {
        const double y = 0.01 + (1.0 - 0.01) * k / 99.0;
        if (std::abs(h_fn(h_inverse(y)) - y) >= 1e-10)
            return {false, "h round trip fails at y = " + std::to_string(y)};
    }
    if (std::abs(g_fn(1.0) - 1.0) >= 1e-12) return {false, "g(1) != 1"};
    if (std::abs(g_fn(0.0) - M_PI / 2.0) >= 1e-12) return {false, "g(0) != pi/2"};
    return {true, "round trip < 1e-10; g endpoints exact to 1e-12"};
}

// 10. Cost ratio of the order-7 versus order-5 evaluation on dense graphs.
Outcome check_cost_ratio() {
    std::vector<std::pair<WeightedGraph, Vector>> instances;
    for (std::uint64_t seed : {1, 2}) {
        WeightedGraph g = gen_graph({GraphModel::ER, 120, 0.8, WeightDist::Unit,
                                     10.0, 5000 + seed});
        GraphOperators ops(g);
        instances.emplace_back(g, scaled_omega(ops, 0.3, seed));
    }
    TimingResult tr = timing_bench(instances, {Method::Series5, Method::Series7}, 9);
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < tr.cells.size(); i += 2) {
        if (tr.cells[i].failed || tr.cells[i + 1].failed)
            return {false, "timing cell failed: " + tr.cells[i].error +
                               tr.cells[i + 1].error};
        ratios.push_back(tr.cells[i + 1].median_seconds / tr.cells[i].median_seconds);
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    std::ostringstream detail;
    detail << "median order-7/order-5 time ratio " << median;
    if (median < 1.1 || median > 2.0) return {false, detail.str() + " outside [1.1, 2.0]"};
    return {true, detail.str()};
}

// 11. Deterministic sweep output.
Outcome check_determinism(const std::vector<SweepRecord>& first,
                          const SweepConfig& cfg) {
    SweepConfig rerun = cfg;
    rerun.threads = 3; // different parallelism must not matter
    const std::string a = sweep_csv(first, cfg);
    const std::string b = sweep_csv(accuracy_sweep(rerun), rerun);
    if (a != b) return {false, "rerun CSV differs"};
    return {true, "rerun CSV byte-identical (" + std::to_string(first.size()) + " rows)"};
}

} // namespace

int main() {
    int failures = 0;
    int index = 0;
    auto report = [&](const char* name, Outcome o) {
        ++index;
        std::printf("%s %2d %s: %s\n", o.passed ? "PASS" : "FAIL", index, name,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += o.passed ? 0 : 1;
    };

    try {
        report("projection algebra", check_projection_suite());
        report("epsilon cycle projection", check_eps_cycle());
        report("symbolic coefficients", check_symbolic_coefficients());
        report("acyclic exactness", check_acyclic_exactness());
        report("transcription equivalence", check_equivalence_suite());
        report("series convergence", check_series_convergence());
        report("sufficient-test soundness", check_soundness());

        const SweepConfig cfg = trend_config();
        const std::vector<SweepRecord> records = accuracy_sweep(cfg);
        report("truncation-test accuracy trend", check_accuracy_trend(records));
        report("gap functions", check_gap_functions());
        report("evaluation cost ratio", check_cost_ratio());
        report("sweep determinism", check_determinism(records, cfg));
    } catch (const std::exception& e) {
        std::printf("FAIL -- unhandled exception: %s\n", e.what());
        return 1;
    }

    std::printf("%d of %d checks passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
