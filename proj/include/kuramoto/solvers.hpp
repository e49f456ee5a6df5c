#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>

#include "kuramoto/graph.hpp"
#include "kuramoto/series.hpp"

namespace kuramoto {

struct SolveOutcome {
    Vector solution;          // phi* (edge) or x* (node), per solver
    int iterations = 0;
    double residual_inf = 0.0;
    bool converged = false;
    bool certified = false;   // T0 held, so ||phi*||_inf <= sin(gamma*)
    double gamma_used = 0.0;
};

struct EquivalenceReport {
    double node_residual = 0.0;
    double flow_residual = 0.0;
    double constrained_residual = 0.0;
    double constrained_membership = 0.0;
    double unconstrained_residual = 0.0;
    double max_mismatch = 0.0;
};

namespace detail {

// Componentwise arcsin with boundary slack: arguments within 1e-12 of +-1 are
// clamped; anything further out throws.
inline Vector arcsin_checked(const Vector& v, const char* who) {
    Vector out(v.size());
    for (int k = 0; k < v.size(); ++k) {
        double x = v(k);
        if (std::abs(x) > 1.0) {
            if (std::abs(x) > 1.0 + 1e-12)
                throw DomainError(std::string(who) + ": |component| = " +
                                  std::to_string(std::abs(x)) + " > 1");
            x = x > 0.0 ? 1.0 : -1.0;
        }
        out(k) = std::asin(x);
    }
    return out;
}

} // namespace detail

/// omega - B diag(w) sin(B^T x)
inline Vector residual_node(const GraphOperators& ops, const Vector& omega,
                            const Vector& x) {
    const Matrix& b = ops.incidence();
    return omega - b * ops.weights().asDiagonal() * (b.transpose() * x).array().sin().matrix();
}

/// eta - P_cut phi - P_cyc arcsin(phi)
inline Vector residual_unconstrained(const GraphOperators& ops, const Vector& eta,
                                     const Vector& phi) {
    return eta - ops.p_cut() * phi -
           ops.p_cyc() * detail::arcsin_checked(phi, "residual_unconstrained");
}

/// eta - P_cut sin(z)
inline Vector residual_flow(const GraphOperators& ops, const Vector& eta,
                            const Vector& z) {
    return eta - ops.p_cut() * z.array().sin().matrix();
}

/// (eta - P_cut psi, ||P_cyc arcsin(psi)||_inf); the scalar measures the
/// Img(B^T) membership constraint.
inline std::pair<Vector, double> residual_constrained(const GraphOperators& ops,
                                                      const Vector& eta,
                                                      const Vector& psi) {
    Vector r = eta - ops.p_cut() * psi;
    double membership =
        inf_norm(Vector(ops.p_cyc() * detail::arcsin_checked(psi, "residual_constrained")));
    return {std::move(r), membership};
}

/// Banach iteration phi <- eta - P_cyc(arcsin(phi) - phi) from phi_0 = eta.
/// Contraction is certified only under T0; the solver runs regardless and
/// flags the outcome.
inline SolveOutcome solve_fixed_point(const GraphOperators& ops, const Vector& eta,
                                      double tol = 1e-10, int max_iter = 10000) {
    const ConvergenceReport t0 = [&] {
        ConvergenceReport r;
        r.eta_norm = inf_norm(eta);
        r.pcyc_norm = ops.pcyc_inf_norm();
        r.h_of_pcyc = h_fn(r.pcyc_norm);
        r.passes_T0 = r.eta_norm < r.h_of_pcyc;
        if (r.passes_T0) r.gamma_star = gamma_star(r.eta_norm);
        return r;
    }();

    SolveOutcome out;
    out.certified = t0.passes_T0;
    out.gamma_used = t0.gamma_star;
    Vector phi = eta;
    for (int it = 1; it <= max_iter; ++it) {
        Vector next;
        try {
            next = eta - ops.p_cyc() * (detail::arcsin_checked(phi, "solve_fixed_point") - phi);
        } catch (const DomainError& e) {
            throw IterateLeftDomain(e.what());
        }
        const double step = inf_norm(Vector(next - phi));
        phi = std::move(next);
        out.iterations = it;
        if (step < tol) {
            out.solution = phi;
            out.residual_inf = inf_norm(residual_unconstrained(ops, eta, phi));
            out.converged = true;
            return out;
        }
    }
    throw MaxIterationsExceeded("fixed-point solver: no convergence in " +
                                std::to_string(max_iter) + " iterations");
}

/// Newton-Raphson on f(x) = omega - B diag(w) sin(B^T x), stepped on the
/// subspace orthogonal to 1_n. Default start is the linearization L^+ omega.
inline SolveOutcome solve_newton(const GraphOperators& ops, const Vector& omega,
                                 std::optional<Vector> x0 = std::nullopt,
                                 double tol = 1e-10, int max_iter = 100) {
    const int n = ops.graph().node_count();
    const Matrix& b = ops.incidence();
    Vector x = x0 ? *x0 : Vector(ops.laplacian_pinv() * omega);
    x.array() -= x.mean();

    SolveOutcome out;
    for (int it = 0; it <= max_iter; ++it) {
        const Vector f = residual_node(ops, omega, x);
        out.iterations = it;
        if (inf_norm(f) < tol) {
            out.solution = x;
            out.residual_inf = inf_norm(f);
            out.converged = true;
            return out;
        }
        if (it == max_iter) break;
        // J(x) = -B diag(w) diag(cos(B^T x)) B^T; solve J dx = -f via a
        // rank-revealing factorization (structural kernel span{1_n}).
        const Vector cosz = (b.transpose() * x).array().cos();
        const Matrix m = b * (ops.weights().cwiseProduct(cosz)).asDiagonal() * b.transpose();
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);
        cod.setThreshold(1e-12);
        if (cod.rank() < n - 1)
            throw SingularJacobian("Jacobian rank " + std::to_string(cod.rank()) +
                                   " < n-1 at iteration " + std::to_string(it));
        Vector dx = cod.solve(f);
        x += dx;
        x.array() -= x.mean();
        if (!x.allFinite())
            throw SingularJacobian("Newton iterate diverged to non-finite values");
    }
    throw MaxIterationsExceeded("Newton solver: no convergence in " +
                                std::to_string(max_iter) + " iterations");
}

/// x = L^+ B diag(w) arcsin(phi), defined when arcsin(phi) is a flow vector.
/// membership_tol bounds the tolerated cycle-space component; loosen it to
/// recover approximate angles from a truncated series.
inline Vector recover_angles(const GraphOperators& ops, const Vector& phi,
                             double membership_tol = 1e-6) {
    const Vector z = detail::arcsin_checked(phi, "recover_angles");
    const double membership = inf_norm(Vector(ops.p_cyc() * z));
    if (membership > membership_tol)
        throw NotAFlowSine("||P_cyc arcsin(phi)||_inf = " + std::to_string(membership));
    Vector x = ops.laplacian_pinv() * ops.incidence() * ops.weights().asDiagonal() * z;
    x.array() -= x.mean();
    return x;
}

/// Evaluate all four balance-equation residuals at the conversions
/// z = B^T x, psi = phi = sin(B^T x).
inline EquivalenceReport check_equivalence(const GraphOperators& ops,
                                           const Vector& omega, const Vector& x) {
    const Vector eta = ops.eta(omega);
    const Vector z = ops.incidence().transpose() * x;
    const Vector phi = z.array().sin();

    EquivalenceReport rep;
    rep.node_residual = inf_norm(residual_node(ops, omega, x));
    rep.flow_residual = inf_norm(residual_flow(ops, eta, z));
    auto [cr, membership] = residual_constrained(ops, eta, phi);
    rep.constrained_residual = inf_norm(cr);
    rep.constrained_membership = membership;
    rep.unconstrained_residual = inf_norm(residual_unconstrained(ops, eta, phi));
    rep.max_mismatch = std::max({rep.node_residual, rep.flow_residual,
                                 rep.constrained_residual, rep.unconstrained_residual,
                                 rep.constrained_membership});
    return rep;
}

} // namespace kuramoto
