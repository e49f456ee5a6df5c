#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kuramoto/graph.hpp"

namespace kuramoto {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// n!! with 0!! = (-1)!! = 1.
inline BigInt double_factorial(int n) {
    if (n < -1) throw DomainError("double_factorial of " + std::to_string(n));
    BigInt r = 1;
    for (int k = n; k > 1; k -= 2) r *= k;
    return r;
}

inline BigInt factorial(int n) {
    BigInt r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

/// Coefficient of r^(2i+1) in the arcsin series: (2i-1)!! / ((2i)!! (2i+1)).
inline Rational arcsin_coeff(int i) {
    if (i < 0) throw DomainError("arcsin_coeff of negative index");
    return Rational(double_factorial(2 * i - 1),
                    double_factorial(2 * i) * BigInt(2 * i + 1));
}

/// One summand of a recursion term: coefficient times the Hadamard product of
/// lower-order terms named by `partition` (odd parts, descending, summing to
/// the term's order), all pushed through -P_cyc.
struct SymbolicSummand {
    Rational coeff;
    std::vector<int> partition;
};

struct SymbolicTerm {
    int order = 1;
    std::vector<SymbolicSummand> summands; // empty for order 1 (A_1 = eta)
};

namespace detail {

// Partitions of `total` into exactly `parts` odd parts, descending.
inline void odd_partitions_rec(int total, int parts, int max_part,
                               std::vector<int>& cur,
                               std::vector<std::vector<int>>& out) {
    if (parts == 0) {
        if (total == 0) out.push_back(cur);
        return;
    }
    // remaining parts are odd and >= 1
    for (int p = std::min(max_part, total - (parts - 1)); p >= 1; p -= 2) {
        cur.push_back(p);
        odd_partitions_rec(total - p, parts - 1, p, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<int>> odd_partitions(int total, int parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    const int start = total % 2 == 1 ? total : total - 1;
    odd_partitions_rec(total, parts, start < 1 ? 1 : start, cur, out);
    return out;
}

// Distinct permutations of the multiset: parts! / prod(multiplicity!).
inline BigInt perm_count(const std::vector<int>& partition) {
    BigInt num = factorial(static_cast<int>(partition.size()));
    int run = 1;
    for (std::size_t k = 1; k <= partition.size(); ++k) {
        if (k < partition.size() && partition[k] == partition[k - 1]) {
            ++run;
        } else {
            num /= factorial(run);
            run = 1;
        }
    }
    return num;
}

} // namespace detail

/// Recursion terms A_1, A_3, ..., A_max_order as exact symbolic data. The
/// term of order 2i+1 collects, for k = 1..i, every multiset of 2k+1 odd
/// orders summing to 2i+1 with coefficient arcsin_coeff(k) times the number
/// of distinct permutations of the multiset.
inline std::vector<SymbolicTerm> symbolic_terms(int max_order) {
    if (max_order < 1 || max_order % 2 == 0)
        throw DomainError("max_order must be odd and >= 1");
    std::vector<SymbolicTerm> terms;
    for (int order = 1; order <= max_order; order += 2) {
        SymbolicTerm t;
        t.order = order;
        const int i = (order - 1) / 2;
        for (int k = 1; k <= i; ++k) {
            const Rational c = arcsin_coeff(k);
            for (auto& part : detail::odd_partitions(order, 2 * k + 1))
                t.summands.push_back({c * Rational(detail::perm_count(part)), part});
        }
        terms.push_back(std::move(t));
    }
    return terms;
}

/// Cached numeric evaluation of the odd-order terms at a fixed eta.
struct SeriesExpansion {
    Vector eta;
    int max_order = 1;
    std::vector<Vector> terms;        // terms[i] = A_{2i+1}(eta)
    std::vector<Vector> partial_sums; // partial_sums[i] = sum through order 2i+1

    /// Partial sum through odd order k (the order-k approximation of phi*).
    const Vector& truncated(int k) const {
        if (k < 1 || k % 2 == 0 || k > max_order)
            throw OrderNotComputed("order " + std::to_string(k) +
                                   " not computed (max " + std::to_string(max_order) + ")");
        return partial_sums[(k - 1) / 2];
    }

    const Vector& term(int k) const {
        if (k < 1 || k % 2 == 0 || k > max_order)
            throw OrderNotComputed("order " + std::to_string(k) + " not computed");
        return terms[(k - 1) / 2];
    }
};

/// Evaluate the recursion bottom-up: each summand is a Hadamard product of
/// cached lower-order terms; each order costs one P_cyc matrix-vector pass.
inline SeriesExpansion evaluate_terms(const Matrix& p_cyc, const Vector& eta,
                                      int max_order) {
    SeriesExpansion se;
    se.eta = eta;
    se.max_order = max_order;
    const auto symbolic = symbolic_terms(max_order);
    std::map<int, Vector> cache;
    cache[1] = eta;
    se.terms.push_back(eta);
    se.partial_sums.push_back(eta);
    for (const auto& st : symbolic) {
        if (st.order == 1) continue;
        Vector acc = Vector::Zero(eta.size());
        for (const auto& s : st.summands) {
            Vector prod = Vector::Ones(eta.size());
            for (int part : s.partition) prod = prod.cwiseProduct(cache.at(part));
            acc += static_cast<double>(s.coeff) * prod;
        }
        Vector a = -(p_cyc * acc);
        cache[st.order] = a;
        se.partial_sums.push_back(se.partial_sums.back() + a);
        se.terms.push_back(std::move(a));
    }
    return se;
}

inline SeriesExpansion evaluate_terms(const GraphOperators& ops, const Vector& eta,
                                      int max_order) {
    return evaluate_terms(ops.p_cyc(), eta, max_order);
}

/// Scalar gap function h(x) = (x+1) sqrt(1 - (x/(x+1))^2) - x arccos(x/(x+1)).
/// h(0) = 1, strictly decreasing to 0.
inline double h_fn(double x) {
    if (x < 0.0) throw DomainError("h is defined for x >= 0");
    const double r = x / (x + 1.0);
    return (x + 1.0) * std::sqrt(1.0 - r * r) - x * std::acos(r);
}

/// Inverse of h on (0, 1], by bracketed bisection.
inline double h_inverse(double y) {
    if (!(y > 0.0) || y > 1.0) throw DomainError("h_inverse needs y in (0, 1]");
    if (y == 1.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (h_fn(hi) >= y) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (h_fn(mid) >= y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Certified angle radius gamma* = arccos(h^-1(r) / (h^-1(r) + 1)) for
/// r = ||eta||_inf in [0, 1]. The limit r -> 0+ gives gamma* -> 0.
inline double gamma_star(double eta_norm) {
    if (eta_norm < 0.0 || eta_norm > 1.0)
        throw DomainError("gamma_star needs ||eta||_inf in [0, 1]");
    if (eta_norm == 0.0) return 0.0;
    const double x = h_inverse(eta_norm);
    return std::acos(x / (x + 1.0));
}

struct ConvergenceReport {
    double eta_norm = 0.0;
    double pcyc_norm = 0.0;
    double h_of_pcyc = 0.0;
    bool passes_T0 = false;
    double gamma_star = 0.0; // defined only when passes_T0
};

/// Test T0: ||B^T L^+ omega||_inf < h(||P_cyc||_inf).
inline ConvergenceReport test_T0(const GraphOperators& ops, const Vector& omega) {
    ConvergenceReport r;
    r.eta_norm = inf_norm(ops.eta(omega));
    r.pcyc_norm = ops.pcyc_inf_norm();
    r.h_of_pcyc = h_fn(r.pcyc_norm);
    r.passes_T0 = r.eta_norm < r.h_of_pcyc;
    if (r.passes_T0) r.gamma_star = gamma_star(r.eta_norm);
    return r;
}

} // namespace kuramoto
