#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kuramoto/experiments.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/sync_tests.hpp"

namespace kuramoto {

/// Case file: {"schema_version":1, "n":int, "edges":[{"i","j","w"}],
/// "omega":[...], "convention":"scaled_injection"|"uniform_gain", "name":...}
struct CaseFile {
    int schema_version = 1;
    int n = 0;
    std::vector<Edge> edges;
    Vector omega;
    Convention convention = Convention::ScaledInjection;
    std::string name;
};

inline CaseFile parse_case_json(const nlohmann::json& j) {
    CaseFile c;
    try {
        c.schema_version = j.at("schema_version").get<int>();
        if (c.schema_version != 1)
            throw ParseError("unsupported schema_version " +
                             std::to_string(c.schema_version));
        c.n = j.at("n").get<int>();
        for (const auto& e : j.at("edges"))
            c.edges.push_back({e.at("i").get<int>(), e.at("j").get<int>(),
                               e.at("w").get<double>()});
        const auto& om = j.at("omega");
        c.omega = Vector(om.size());
        for (std::size_t k = 0; k < om.size(); ++k)
            c.omega(static_cast<int>(k)) = om[k].get<double>();
        if (j.contains("convention")) {
            const std::string conv = j["convention"].get<std::string>();
            if (conv == "scaled_injection")
                c.convention = Convention::ScaledInjection;
            else if (conv == "uniform_gain")
                c.convention = Convention::UniformGain;
            else
                throw ParseError("unknown convention \"" + conv + "\"");
        }
        if (j.contains("name")) c.name = j["name"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("case file: ") + e.what());
    }
    if (static_cast<int>(c.omega.size()) != c.n)
        throw ParseError("omega length " + std::to_string(c.omega.size()) +
                         " != n = " + std::to_string(c.n));
    return c;
}

/// Load and validate a case: returns the graph and centered omega.
/// auto_center subtracts the mean; otherwise an uncentered omega throws.
inline std::pair<WeightedGraph, Vector> parse_case(const std::string& path,
                                                   bool auto_center = false,
                                                   CaseFile* raw = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    CaseFile c = parse_case_json(j);
    WeightedGraph g(c.n, c.edges);
    Vector omega = c.omega;
    if (auto_center)
        omega.array() -= omega.mean();
    else
        GraphOperators::require_centered(omega);
    if (raw) *raw = c;
    return {std::move(g), std::move(omega)};
}

inline nlohmann::json case_to_json(const WeightedGraph& g, const Vector& omega,
                                   Convention conv, const std::string& name = "") {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["n"] = g.node_count();
    auto edges = nlohmann::json::array();
    for (const auto& e : g.edges())
        edges.push_back({{"i", e.i}, {"j", e.j}, {"w", e.w}});
    j["edges"] = std::move(edges);
    j["omega"] = std::vector<double>(omega.data(), omega.data() + omega.size());
    j["convention"] =
        conv == Convention::ScaledInjection ? "scaled_injection" : "uniform_gain";
    if (!name.empty()) j["name"] = name;
    return j;
}

/// Floats in CSV output carry 17 significant digits (round-trip exact).
inline std::string csv_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Write-to-temp then atomic rename; no partially written output files.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

/// Sweep CSV: one header row, then one line per record. Columns are fixed by
/// the requested test list; timing columns are deliberately absent so reruns
/// are byte-identical.
inline std::string sweep_csv(const std::vector<SweepRecord>& records,
                             const SweepConfig& cfg) {
    std::vector<TestId> tests;
    if (cfg.sufficient_tests)
        tests = {{TestKind::T0, 0}, {TestKind::T1, 0}, {TestKind::T2, 0}};
    for (int k : cfg.at_orders) tests.push_back(TestId::AT(k));

    std::ostringstream out;
    out << "model,p,dist,trial,seed,n,m,K_C";
    for (const auto& t : tests) out << ",K_" << t.name();
    for (const auto& t : tests) out << ",ratio_KC_over_K" << t.name();
    out << ",error\n";
    for (const auto& r : records) {
        out << model_name(r.model) << ',' << csv_double(r.p) << ','
            << dist_name(r.dist) << ',' << r.trial << ',' << r.seed << ',' << r.n
            << ',' << r.m << ',' << csv_double(r.K_C);
        for (const auto& t : tests) {
            auto it = r.K_T.find(t);
            out << ',' << (it == r.K_T.end() ? "" : csv_double(it->second));
        }
        for (const auto& t : tests) {
            auto it = r.ratio_KC_over_KT.find(t);
            out << ','
                << (it == r.ratio_KC_over_KT.end() ? "" : csv_double(it->second));
        }
        out << ',' << r.error << '\n';
    }
    return out.str();
}

inline std::string error_curve_csv(const ErrorCurve& curve) {
    std::ostringstream out;
    out << "order,S_k\n";
    for (std::size_t i = 0; i < curve.orders.size(); ++i)
        out << curve.orders[i] << ',' << csv_double(curve.s[i]) << '\n';
    return out.str();
}

inline std::string timing_csv(const TimingResult& tr) {
    std::ostringstream out;
    out << "method,instance,median_seconds,residual,failed,error\n";
    for (const auto& c : tr.cells)
        out << method_name(c.method) << ',' << c.instance << ','
            << csv_double(c.median_seconds) << ',' << csv_double(c.residual) << ','
            << (c.failed ? 1 : 0) << ',' << c.error << '\n';
    out << "# precompute_seconds," << csv_double(tr.precompute_seconds) << '\n';
    return out.str();
}

} // namespace kuramoto
