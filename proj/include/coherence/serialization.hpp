#pragma once

// CSV trajectories and JSON records.
//
// Trajectory CSV: a `# method=<tag>` line, then the header
// `tau,x1,x2,x3,x4,x5,x6,x7,x8,norm` (optionally followed by extra columns),
// then one row per sample with 17 significant digits.

#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coherence/boundary_solver.hpp"
#include "coherence/optimality_search.hpp"
#include "coherence/reduced_dynamics.hpp"
#include "coherence/spin_algebra.hpp"

namespace coherence {

using json = nlohmann::json;

inline constexpr const char* kTrajectoryHeader = "tau,x1,x2,x3,x4,x5,x6,x7,x8,norm";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ExtraColumn {
    std::string name;
    std::vector<double> values;  ///< one per sample
};

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<ExtraColumn>& extra = {}) {
    for (const auto& col : extra)
        if (col.values.size() != traj.samples.size())
            throw std::invalid_argument("extra column '" + col.name + "' has the wrong length");
    os << "# method=" << method_name(traj.method) << '\n' << kTrajectoryHeader;
    for (const auto& col : extra) os << ',' << col.name;
    os << '\n';
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const auto& s = traj.samples[k];
        os << format_double(s.tau);
        for (int i = 0; i < 8; ++i) os << ',' << format_double(s.x(i));
        os << ',' << format_double(s.x.norm());
        for (const auto& col : extra) os << ',' << format_double(col.values[k]);
        os << '\n';
    }
}

/// Parsed trajectory CSV (used by tests and tooling).
struct CsvTable {
    std::string method;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_trajectory_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (std::size_t pos; (pos = s.find(',', start)) != std::string::npos; start = pos + 1)
            out.push_back(s.substr(start, pos - start));
        out.push_back(s.substr(start));
        return out;
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# method=", 0) == 0) {
            t.method = line.substr(9);
            continue;
        }
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(line)) row.push_back(std::stod(cell));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline json to_json(const ControlParams& p) {
    return {{"K", p.K},           {"omega_hat", p.omega_hat}, {"b0", p.b0},
            {"bz", p.bz},         {"omega_rf", p.omega_rf},   {"theta0", p.theta0}};
}

/// Reads controls from a JSON object; K defaults to 1, the rest to 0.
inline ControlParams control_params_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("control parameters must be a JSON object");
    ControlParams p;
    p.K = j.value("K", 1.0);
    p.omega_hat = j.value("omega_hat", 0.0);
    p.b0 = j.value("b0", 0.0);
    p.bz = j.value("bz", 0.0);
    p.omega_rf = j.value("omega_rf", 0.0);
    p.theta0 = j.value("theta0", 0.0);
    return p;
}

inline ControlParams load_control_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parameter file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed JSON in '" + path + "': " + e.what());
    }
    // Accept either a bare parameter object or a solution record with "params".
    if (j.contains("params") && j["params"].is_object()) {
        json inner = j["params"];
        if (!inner.contains("K") && j.contains("k_sign")) inner["K"] = j["k_sign"];
        return control_params_from_json(inner);
    }
    return control_params_from_json(j);
}

inline json to_json(const Branch& b) {
    return {{"b0_sign", b.b0_sign}, {"omega_sign", b.omega_sign}, {"theta_sign", b.theta_sign}, {"r", b.r}};
}

template <std::size_t N>
json to_json_array(const std::array<double, N>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

/// Solution record: {m0, n0, k_sign, tau_star, a, b, c_plus, c_minus, d, p, q,
/// params:{omega_hat, b0, bz, omega_rf, theta0, branch:{...}} | null,
/// residuals:{boundary:[8], b_eq, d_eq}}.
inline json solution_record(const AnalyticSolution& sol, const std::optional<InversionRoot>& root) {
    const BoundaryConstants& c = sol.constants;
    json rec = {{"m0", sol.qn.m0},       {"n0", sol.qn.n0},   {"k_sign", sol.k_sign}, {"tau_star", sol.tau_star},
                {"a", c.a},              {"b", c.b},          {"c_plus", c.c_plus},   {"c_minus", c.c_minus},
                {"d", c.d},              {"p", sol.qn.p},     {"q", sol.qn.q}};
    json residuals = {{"boundary", to_json_array(boundary_residuals(c))}};
    if (root) {
        const ControlParams& p = root->params;
        rec["params"] = {{"omega_hat", p.omega_hat}, {"b0", p.b0},         {"bz", p.bz},
                         {"omega_rf", p.omega_rf},   {"theta0", p.theta0}, {"branch", to_json(root->branch)}};
        residuals["b_eq"] = root->b_residual;
        residuals["d_eq"] = root->d_residual;
    } else {
        rec["params"] = nullptr;
        residuals["b_eq"] = nullptr;
        residuals["d_eq"] = nullptr;
    }
    rec["residuals"] = residuals;
    return rec;
}

inline json to_json(const SearchResult& r) {
    json j = {{"omega_hat", r.omega_hat},
              {"K", r.K},
              {"target", "x" + std::to_string(r.component)},
              {"threshold", r.config.threshold},
              {"tau_max", r.config.tau_max},
              {"dtau", r.config.dtau},
              {"grid",
               {{"resolution", r.resolution},
                {"bz", {r.bounds.bz_lo, r.bounds.bz_hi}},
                {"omega_rf", {r.bounds.omega_lo, r.bounds.omega_hi}},
                {"theta0", {r.bounds.theta_lo, r.bounds.theta_hi}}}},
              {"feasible", r.feasible},
              {"evaluated", r.evaluated},
              {"off_surface", r.off_surface},
              {"achieved", r.achieved},
              {"refinement_trace", r.trace},
              {"note", r.note}};
    j["best_tau"] = r.best_tau ? json(*r.best_tau) : json(nullptr);
    j["best"] = r.feasible ? to_json(r.best) : json(nullptr);
    return j;
}

inline json to_json(const ProbeResult& r, int component) {
    return {{"target", "x" + std::to_string(component)},
            {"max_value", r.max_value},
            {"tau", r.tau},
            {"evaluated", r.evaluated},
            {"params", to_json(r.params)}};
}

inline json to_json(const ConsistencyScan& s) {
    json pts = json::array();
    for (const auto& pt : s.points)
        pts.push_back({{"omega_hat", pt.omega_hat},
                       {"branch", to_json(pt.branch)},
                       {"b_residual", pt.b_residual},
                       {"d_residual", pt.d_residual}});
    json curve = json::array();
    for (const auto& c : s.curve) curve.push_back({c.omega_hat, c.residual});
    return {{"consistent_omegas", s.omegas()}, {"points", pts}, {"residual_curve", curve}};
}

inline json to_json(const std::vector<SweepRow>& rows) {
    json a = json::array();
    for (const auto& r : rows)
        a.push_back({{"m0", r.m0}, {"n0", r.n0}, {"tau_star", r.tau_star}, {"admissible", r.admissible}});
    return a;
}

}  // namespace coherence
