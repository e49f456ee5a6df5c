#pragma once

#include "kuramoto/graph.hpp"
#include "kuramoto/random_models.hpp"

namespace fixtures {

using namespace kuramoto;

// Smallest cyclic graph: unit-weight K3.
inline WeightedGraph triangle() {
    return WeightedGraph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
}

// Single unit edge.
inline WeightedGraph path2() {
    return WeightedGraph(2, {{0, 1, 1.0}});
}

// 3-cycle with one weight epsilon; P_cyc is discontinuous at eps -> 0.
inline WeightedGraph eps3(double eps) {
    return WeightedGraph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, eps}});
}

// Seeded connected ER graph with unit weights.
inline WeightedGraph random_er(int n, double p, std::uint64_t seed) {
    return gen_graph({GraphModel::ER, n, p, WeightDist::Unit, 10.0, seed});
}

// Random centered frequency vector scaled so that ||eta||_inf == target.
inline Vector scaled_omega(const GraphOperators& ops, double target,
                           std::uint64_t seed) {
    Vector omega = gen_frequencies(
        {FreqDist::Uniform, 1.0, ops.graph().node_count(), seed});
    const double norm = inf_norm(ops.eta(omega));
    return omega * (target / norm);
}

} // namespace fixtures
