#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kuramoto/graph.hpp"

namespace kuramoto {

/// SplitMix64; used for seeding and for deriving disjoint per-trial streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream-split: the seed of worker/trial `index` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = master ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL);
    return a ^ splitmix64(s);
}

/// xoshiro256++ (Blackman & Vigna), seeded through SplitMix64. Chosen for
/// bit-identical streams across platforms and languages.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& si : s_) si = splitmix64(s);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t bounded(std::uint64_t bound) {
        const std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

enum class GraphModel { ER, RGG, WS };
enum class WeightDist { Unit, Uniform };
enum class FreqDist { Uniform, Bipolar };

struct ModelSpec {
    GraphModel model = GraphModel::ER;
    int n = 2;
    double p = 0.5;              // edge probability / radius / rewiring prob
    WeightDist weight_dist = WeightDist::Unit;
    double w_max = 10.0;
    std::uint64_t seed = 0;
    int ws_neighbors_per_side = 2; // Watts-Strogatz ring degree = 2x this
    int retry_cap = 10000;
};

struct FrequencySpec {
    FreqDist dist = FreqDist::Uniform;
    double amplitude = 1.0; // uniform support (-a, a)
    int n = 2;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<Edge> draw_er(int n, double p, Xoshiro256pp& rng) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform01() < p) edges.push_back({i, j, 1.0});
    return edges;
}

inline std::vector<Edge> draw_rgg(int n, double radius, Xoshiro256pp& rng) {
    std::vector<std::pair<double, double>> pts(n);
    for (auto& pt : pts) pt = {1.0 - rng.uniform01(), 1.0 - rng.uniform01()}; // (0,1]^2
    std::vector<Edge> edges;
    const double r2 = radius * radius;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dx = pts[i].first - pts[j].first;
            const double dy = pts[i].second - pts[j].second;
            if (dx * dx + dy * dy <= r2) edges.push_back({i, j, 1.0});
        }
    return edges;
}

inline std::vector<Edge> draw_ws(int n, double p, int k_side, Xoshiro256pp& rng) {
    auto key = [](int a, int b) { return std::pair{std::min(a, b), std::max(a, b)}; };
    std::vector<std::pair<int, int>> ring;
    for (int i = 0; i < n; ++i)
        for (int j = 1; j <= k_side; ++j) {
            int a = i, b = (i + j) % n;
            if (a != b) ring.push_back(key(a, b));
        }
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());

    std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
    for (auto [a, b] : ring) present[a][b] = present[b][a] = 1;

    // Rewire each lattice edge with probability p, keeping the lower endpoint
    // and avoiding self-loops and duplicates.
    std::vector<std::pair<int, int>> edges = ring;
    for (auto& [a, b] : edges) {
        if (rng.uniform01() >= p) continue;
        for (int attempt = 0; attempt < 4 * n; ++attempt) {
            const int c = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
            if (c == a || present[a][c]) continue;
            present[a][b] = present[b][a] = 0;
            present[a][c] = present[c][a] = 1;
            b = c;
            break;
        }
    }
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (auto [a, b] : edges) out.push_back({a, b, 1.0});
    return out;
}

} // namespace detail

/// Seeded random connected graph. Disconnected draws are discarded and
/// redrawn from the same stream, up to spec.retry_cap attempts.
inline WeightedGraph gen_graph(const ModelSpec& spec) {
    if (spec.n < 2) throw Error("ModelSpec.n must be >= 2");
    if (spec.model != GraphModel::RGG && (spec.p <= 0.0 || spec.p > 1.0))
        throw Error("ModelSpec.p must be in (0, 1]");
    Xoshiro256pp rng(spec.seed);
    for (int attempt = 0; attempt < spec.retry_cap; ++attempt) {
        std::vector<Edge> edges;
        switch (spec.model) {
            case GraphModel::ER: edges = detail::draw_er(spec.n, spec.p, rng); break;
            case GraphModel::RGG: edges = detail::draw_rgg(spec.n, spec.p, rng); break;
            case GraphModel::WS:
                edges = detail::draw_ws(spec.n, spec.p, spec.ws_neighbors_per_side, rng);
                break;
        }
        if (spec.weight_dist == WeightDist::Uniform)
            for (auto& e : edges) e.w = spec.w_max * (1.0 - rng.uniform01()); // (0, w_max]
        try {
            return WeightedGraph(spec.n, std::move(edges));
        } catch (const DisconnectedGraph&) {
            continue;
        }
    }
    throw RetriesExhausted("no connected draw in " + std::to_string(spec.retry_cap) +
                           " attempts (model p = " + std::to_string(spec.p) + ")");
}

/// Seeded natural frequencies, explicitly centered: omega_i = q_i - mean(q).
inline Vector gen_frequencies(const FrequencySpec& spec) {
    Xoshiro256pp rng(spec.seed);
    Vector q(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        if (spec.dist == FreqDist::Uniform)
            q(i) = spec.amplitude * (2.0 * rng.uniform01() - 1.0);
        else
            q(i) = rng.next() & 1ULL ? 1.0 : -1.0;
    }
    return q.array() - q.mean();
}

/// Replace unit weights with independent uniform draws on (0, w_max].
inline WeightedGraph gen_weights(const WeightedGraph& g, WeightDist dist,
                                 std::uint64_t seed, double w_max = 10.0) {
    if (dist == WeightDist::Unit) return g;
    Xoshiro256pp rng(seed);
    Vector w(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) w(e) = w_max * (1.0 - rng.uniform01());
    return g.with_weights(w);
}

} // namespace kuramoto
