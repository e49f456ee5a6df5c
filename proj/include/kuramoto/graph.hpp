#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kuramoto/errors.hpp"

namespace kuramoto {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Edge {
    int i = 0;
    int j = 0;
    double w = 1.0;
};

inline double inf_norm(const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double inf_norm(const Matrix& a) {
    // induced infinity norm: max absolute row sum
    return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Connected undirected graph with positive edge weights. Edges are
/// canonicalized at construction (i < j, sorted lexicographically) and that
/// fixed order defines the row order of every edge vector downstream.
class WeightedGraph {
public:
    WeightedGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        if (n_ < 2) throw Error("graph needs at least 2 nodes");
        for (auto& e : edges_) {
            if (e.i < 0 || e.i >= n_ || e.j < 0 || e.j >= n_)
                throw Error("edge endpoint out of range");
            if (e.i == e.j) throw SelfLoop("self-loop at node " + std::to_string(e.i));
            if (!(e.w > 0.0))
                throw NonpositiveWeight("edge (" + std::to_string(e.i) + "," +
                                        std::to_string(e.j) + ") has weight " +
                                        std::to_string(e.w));
            if (e.i > e.j) std::swap(e.i, e.j);
        }
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return std::pair{a.i, a.j} < std::pair{b.i, b.j};
        });
        for (std::size_t k = 1; k < edges_.size(); ++k)
            if (edges_[k - 1].i == edges_[k].i && edges_[k - 1].j == edges_[k].j)
                throw DuplicateEdge("duplicate edge (" + std::to_string(edges_[k].i) +
                                    "," + std::to_string(edges_[k].j) + ")");
        if (!connected())
            throw DisconnectedGraph("graph is not connected");
    }

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool acyclic() const { return edge_count() == n_ - 1; }

    /// Incidence matrix B: edge (i,j) with i<j gets +1 at row i, -1 at row j.
    Matrix incidence() const {
        Matrix b = Matrix::Zero(n_, edge_count());
        for (int e = 0; e < edge_count(); ++e) {
            b(edges_[e].i, e) = 1.0;
            b(edges_[e].j, e) = -1.0;
        }
        return b;
    }

    Vector weights() const {
        Vector w(edge_count());
        for (int e = 0; e < edge_count(); ++e) w(e) = edges_[e].w;
        return w;
    }

    /// L = B diag(w) B^T
    Matrix laplacian() const {
        Matrix l = Matrix::Zero(n_, n_);
        for (const auto& e : edges_) {
            l(e.i, e.i) += e.w;
            l(e.j, e.j) += e.w;
            l(e.i, e.j) -= e.w;
            l(e.j, e.i) -= e.w;
        }
        return l;
    }

    WeightedGraph with_weights(const Vector& w) const {
        std::vector<Edge> es = edges_;
        for (std::size_t k = 0; k < es.size(); ++k) es[k].w = w(static_cast<int>(k));
        return WeightedGraph(n_, std::move(es));
    }

    WeightedGraph scaled(double c) const {
        std::vector<Edge> es = edges_;
        for (auto& e : es) e.w *= c;
        return WeightedGraph(n_, std::move(es));
    }

private:
    bool connected() const {
        std::vector<std::vector<int>> adj(n_);
        for (const auto& e : edges_) {
            adj[e.i].push_back(e.j);
            adj[e.j].push_back(e.i);
        }
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u : adj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    ++count;
                    stack.push_back(u);
                }
        }
        return count == n_;
    }

    int n_;
    std::vector<Edge> edges_;
};

/// Moore-Penrose pseudoinverse of a connected-graph Laplacian, via symmetric
/// eigendecomposition. Eigenvalues below 1e-10 * lambda_max are treated as
/// zero; only span{1_n} may be in the kernel.
inline Matrix laplacian_pinv(const Matrix& l) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(l);
    const Vector& lam = es.eigenvalues();
    const Matrix& q = es.eigenvectors();
    const int n = static_cast<int>(l.rows());
    const double cutoff = 1e-10 * lam.cwiseAbs().maxCoeff();
    Vector inv = Vector::Zero(n);
    int rank = 0;
    for (int k = 0; k < n; ++k) {
        if (std::abs(lam(k)) > cutoff) {
            inv(k) = 1.0 / lam(k);
            ++rank;
        }
    }
    if (rank < n - 1)
        throw SingularBeyondKernel("Laplacian rank " + std::to_string(rank) +
                                   " < n-1; graph effectively disconnected");
    return q * inv.asDiagonal() * q.transpose();
}

/// Precomputed linear-algebra operators for one graph: B, L, L^+, the cutset
/// and cycle projections and their infinity norms. Immutable after
/// construction; shared freely across workers.
class GraphOperators {
public:
    explicit GraphOperators(const WeightedGraph& g)
        : graph_(g),
          b_(g.incidence()),
          w_(g.weights()),
          lap_(g.laplacian()),
          lap_pinv_(kuramoto::laplacian_pinv(lap_)),
          bt_lpinv_(b_.transpose() * lap_pinv_) {
        if (g.acyclic()) {
            // every edge vector is a flow: the projections are exactly I and 0
            p_cut_ = Matrix::Identity(g.edge_count(), g.edge_count());
            p_cyc_ = Matrix::Zero(g.edge_count(), g.edge_count());
        } else {
            p_cut_ = bt_lpinv_ * b_ * w_.asDiagonal();
            p_cyc_ = Matrix::Identity(g.edge_count(), g.edge_count()) - p_cut_;
        }
        pcut_inf_ = inf_norm(p_cut_);
        pcyc_inf_ = inf_norm(p_cyc_);
    }

    const WeightedGraph& graph() const { return graph_; }
    const Matrix& incidence() const { return b_; }
    const Vector& weights() const { return w_; }
    const Matrix& laplacian() const { return lap_; }
    const Matrix& laplacian_pinv() const { return lap_pinv_; }
    const Matrix& bt_lpinv() const { return bt_lpinv_; }
    const Matrix& p_cut() const { return p_cut_; }
    const Matrix& p_cyc() const { return p_cyc_; }
    double pcut_inf_norm() const { return pcut_inf_; }
    double pcyc_inf_norm() const { return pcyc_inf_; }

    static double centering_tolerance(const Vector& omega) {
        return 1e-8 * std::max(1e-30, inf_norm(omega));
    }

    static void require_centered(const Vector& omega) {
        if (inf_norm(omega) == 0.0) return;
        if (std::abs(omega.mean()) > 1e-8 * inf_norm(omega))
            throw UncenteredFrequencies("mean(omega) = " + std::to_string(omega.mean()));
    }

    /// eta = B^T L^+ omega, the linearized edge flow.
    Vector eta(const Vector& omega) const {
        require_centered(omega);
        return bt_lpinv_ * omega;
    }

    /// Flow-membership check: ||P_cyc v||_inf <= 1e-8 * max(1, ||v||_inf).
    bool is_flow(const Vector& v) const {
        return inf_norm(Vector(p_cyc_ * v)) <= 1e-8 * std::max(1.0, inf_norm(v));
    }

private:
    WeightedGraph graph_;
    Matrix b_;
    Vector w_;
    Matrix lap_;
    Matrix lap_pinv_;
    Matrix bt_lpinv_;
    Matrix p_cut_;
    Matrix p_cyc_;
    double pcut_inf_ = 0.0;
    double pcyc_inf_ = 0.0;
};

} // namespace kuramoto
