// coherence_cli: reproducible runs of the coherence-transfer solver.
//
//   coherence_cli analytic  --m0 0 --n0 0 --k +1
//   coherence_cli propagate --params p.json --method rk4 --dtau 1e-4 --tau-end 1.36 --out traj.csv
//   coherence_cli verify    --omega-hat auto
//   coherence_cli sweep     --max 3
//   coherence_cli scan      --from 2.0 --to 4.0 --samples 4001
//   coherence_cli search    --target x7
//   coherence_cli invert    --omega-hat 2.3 --tau-star 1.3603 --b-target -3.14159
//
// Exit codes: 0 success, 1 check failure, 2 usage or input error.
// `--config FILE` reads a flat JSON object of flag values; explicit flags win.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coherence/coherence.hpp"

namespace {

using namespace coherence;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes text to `path`, or stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write output file '" + path + "'");
    out << text;
}

int parse_sign(const std::string& s) {
    if (s == "+1" || s == "1" || s == "+") return 1;
    if (s == "-1" || s == "-") return -1;
    throw UsageError("sign must be +1 or -1, got '" + s + "'");
}

/// Expands `--config FILE` into flag tokens placed right after the
/// subcommand, so later (explicit) flags override them.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::vector<std::string> out;
    std::vector<std::string> from_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            const std::string path = args[++i];
            std::ifstream in(path);
            if (!in) throw UsageError("cannot open config file '" + path + "'");
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw UsageError("malformed config '" + path + "': " + e.what());
            }
            if (!j.is_object()) throw UsageError("config '" + path + "' must be a JSON object");
            for (const auto& [key, value] : j.items()) {
                if (value.is_boolean()) {
                    if (value.get<bool>()) from_file.push_back("--" + key);
                    continue;
                }
                from_file.push_back("--" + key);
                from_file.push_back(value.is_string() ? value.get<std::string>() : value.dump());
            }
            continue;
        }
        out.push_back(args[i]);
    }
    if (!from_file.empty()) {
        const std::size_t at = out.size() > 1 ? 2 : out.size();
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), from_file.begin(), from_file.end());
    }
    return out;
}

// ---------------------------------------------------------------------------

struct AnalyticOpts {
    int m0 = 0, n0 = 0;
    std::string k = "+1";
    std::string c_sign;
    double omega_hat = consistent_omega_closed_form();
    double tol = 1e-10;
    std::string out;
};

int cmd_analytic(const AnalyticOpts& o) {
    const int k = parse_sign(o.k);
    const int c = o.c_sign.empty() ? k : parse_sign(o.c_sign);
    if (o.m0 < 0 || o.n0 < o.m0) throw UsageError("ordering violated: need n0 >= m0 >= 0");
    const AnalyticSolution sol = analytic_family(o.m0, o.n0, k, c);

    std::optional<InversionRoot> root;
    if (o.omega_hat * o.omega_hat > 2.0) {
        InversionRequest req;
        req.omega_hat = o.omega_hat;
        req.K = k;
        req.tau_star = sol.tau_star;
        req.b_target = sol.constants.b;
        req.c_plus = sol.constants.c_plus;
        req.r_min = 0;
        req.r_max = 1;
        try {
            const auto roots = invert_to_physical(req);
            if (!roots.empty()) root = roots.front();
        } catch (const std::domain_error&) {
            // bz implied by c_plus exceeds the field norm: no physical controls at this energy.
        }
    }
    emit(o.out, solution_record(sol, root).dump(2) + "\n");
    const bool ok = max_abs(boundary_residuals(sol.constants)) <= o.tol &&
                    max_abs(integer_relations_check(sol.constants, sol.qn)) <= o.tol;
    if (!ok) std::cerr << "boundary residuals exceed " << o.tol << '\n';
    return ok ? kExitOk : kExitCheckFailed;
}

struct PropagateOpts {
    std::string params;
    std::string method = "rk4";
    double dtau = 1e-4;
    double tau_end = optimal_tau_star();
    int record_every = 1;
    std::string out;
};

int cmd_propagate(const PropagateOpts& o) {
    ControlParams p;
    try {
        p = load_control_params(o.params);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    const Method method = method_from_name(o.method);
    if (!(o.dtau > 0.0)) throw UsageError("--dtau must be positive");
    if (o.tau_end < 0.0) throw UsageError("--tau-end must be nonnegative");

    Trajectory traj;
    std::vector<ExtraColumn> extra;
    switch (method) {
        case Method::rk4: traj = propagate_rk4(p, unit_state(1), o.tau_end, o.dtau, o.record_every); break;
        case Method::rotating_exact:
        case Method::expm_integral:
            traj = sample_closed_form(p, unit_state(1), o.tau_end, o.dtau, method, o.record_every);
            break;
        case Method::full_hilbert: traj = full_hilbert_trajectory(p, o.tau_end, o.dtau, o.record_every); break;
    }
    if (method == Method::expm_integral) {
        ExtraColumn col{"discrepancy", {}};
        for (const auto& s : traj.samples) col.values.push_back((s.x - exact_state(p, unit_state(1), s.tau)).norm());
        extra.push_back(std::move(col));
    }
    std::ostringstream os;
    write_trajectory_csv(os, traj, extra);
    emit(o.out, os.str());
    return kExitOk;
}

struct VerifyOpts {
    std::string omega_hat = "auto";
    std::string k = "+1";
    int closure_sets = 10;
    int dynamics_sets = 5;
    double dtau = 1e-4;
    int resolution = 21;
    bool skip_search = false;
    std::string json_out;
};

int cmd_verify(const VerifyOpts& o) {
    VerifyConfig cfg;
    cfg.k_sign = parse_sign(o.k);
    if (o.omega_hat != "auto") {
        double w = 0.0;
        try {
            w = std::stod(o.omega_hat);
        } catch (const std::exception&) {
            throw UsageError("--omega-hat must be a number or 'auto'");
        }
        if (!(w * w > 2.0)) throw UsageError("omega_hat = " + o.omega_hat + " is below the energy floor (omega^2 > 2)");
        cfg.omega_hat = w;
    }
    if (o.closure_sets < 1 || o.dynamics_sets < 0 || o.resolution < 1) throw UsageError("counts must be positive");
    if (!(o.dtau > 0.0)) throw UsageError("--dtau must be positive");
    cfg.closure_sets = o.closure_sets;
    cfg.dynamics_sets = o.dynamics_sets;
    cfg.dynamics_dtau = o.dtau;
    cfg.search_resolution = o.resolution;
    cfg.run_search = !o.skip_search;

    const VerificationReport rep = run_verification(cfg);
    rep.print(std::cout);
    if (!o.json_out.empty()) emit(o.json_out, rep.to_json().dump(2) + "\n");
    return rep.exit_code();
}

struct SweepOpts {
    int max = 3;
    int m0_max = -1, n0_max = -1;
    bool as_json = false;
    std::string out;
};

int cmd_sweep(const SweepOpts& o) {
    const int m_max = o.m0_max >= 0 ? o.m0_max : o.max;
    const int n_max = o.n0_max >= 0 ? o.n0_max : o.max;
    if (m_max < 0 || n_max < 0) throw UsageError("sweep bounds must be nonnegative");
    const auto rows = sweep_tau(m_max, n_max);
    std::ostringstream os;
    if (o.as_json) {
        os << to_json(rows).dump(2) << '\n';
    } else {
        os << "m0,n0,tau_star,admissible\n";
        for (const auto& r : rows) os << r.m0 << ',' << r.n0 << ',' << format_double(r.tau_star) << ',' << r.admissible << '\n';
    }
    emit(o.out, os.str());
    return kExitOk;
}

struct ScanOpts {
    double from = 2.0, to = 4.0;
    int samples = 4001;
    std::string k = "+1";
    double tol = 1e-9;
    std::string out;
};

int cmd_scan(const ScanOpts& o) {
    if (o.samples < 1 || !(o.to > o.from)) throw UsageError("scan needs --samples >= 1 and --from < --to");
    const ConsistencyScan scan = consistency_scan(o.from, o.to, parse_sign(o.k), o.samples, o.tol);
    std::cout << "consistent omega_hat:";
    for (double w : scan.omegas()) std::cout << ' ' << format_double(w);
    std::cout << "\nbranches satisfying b, d equations: " << scan.points.size() << '\n';
    if (!o.out.empty()) emit(o.out, to_json(scan).dump(2) + "\n");
    return kExitOk;
}

struct SearchOpts {
    std::string target = "x8";
    std::string omega_hat = "auto";
    std::string k = "+1";
    int resolution = 21;
    double threshold = 0.999;
    double tau_max = 3.0 * optimal_tau_star();
    double dtau = 1e-3;
    int refine = 0;
    std::string out;
};

int cmd_search(const SearchOpts& o) {
    const Target target = target_from_name(o.target);
    const int k = parse_sign(o.k);
    const double omega = o.omega_hat == "auto" ? consistent_omega_closed_form() : std::stod(o.omega_hat);
    if (!(omega * omega > 2.0)) throw UsageError("omega_hat below the energy floor");
    SearchConfig cfg{o.threshold, o.tau_max, o.dtau};
    const int comp = target_component(target);
    SearchResult res = grid_search(omega, k, comp, SearchBounds::defaults(omega), o.resolution, cfg);
    if (o.refine > 0) res = refine_local(res, o.refine);
    const ProbeResult sup = no_transfer_probe({omega}, k, o.tau_max, o.resolution, comp, o.dtau);

    json j = to_json(res);
    j["supremum"] = to_json(sup, comp);
    emit(o.out, j.dump(2) + "\n");
    std::cerr << "max " << o.target << " = " << format_double(sup.max_value) << " at tau = " << format_double(sup.tau)
              << "; best time to " << o.threshold << ": "
              << (res.best_tau ? format_double(*res.best_tau) : std::string("never")) << '\n';
    return kExitOk;
}

struct InvertOpts {
    double omega_hat = consistent_omega_closed_form();
    std::string k = "+1";
    double tau_star = optimal_tau_star();
    double b_target = -pi;
    std::optional<double> c_plus;
    int r_min = 0, r_max = 0;
    double root_lo = 1e-3, root_hi = 20.0;
    std::string out;
};

int cmd_invert(const InvertOpts& o) {
    InversionRequest req;
    req.omega_hat = o.omega_hat;
    req.K = parse_sign(o.k);
    req.tau_star = o.tau_star;
    req.b_target = o.b_target;
    req.c_plus = o.c_plus;
    req.r_min = o.r_min;
    req.r_max = o.r_max;
    req.root_lo = o.root_lo;
    req.root_hi = o.root_hi;
    std::vector<InversionRoot> roots;
    try {
        roots = invert_to_physical(req);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    json arr = json::array();
    for (const auto& r : roots)
        arr.push_back({{"params", to_json(r.params)},
                       {"branch", to_json(r.branch)},
                       {"b_residual", r.b_residual},
                       {"d_residual", r.d_residual}});
    emit(o.out, arr.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-optimal coherence transfer in a three-qubit Ising chain"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "JSON file with flag values (explicit flags override)");

    AnalyticOpts ao;
    auto* analytic = app.add_subcommand("analytic", "Integer-labelled boundary solution as a JSON record");
    analytic->add_option("--m0", ao.m0, "m0 (m = 2 m0)");
    analytic->add_option("--n0", ao.n0, "n0 (n = 2 n0 + 1), n0 >= m0");
    analytic->add_option("--k", ao.k, "coupling sign K, +1 or -1");
    analytic->add_option("--c-sign", ao.c_sign, "sign of c+ (defaults to K)");
    analytic->add_option("--omega-hat", ao.omega_hat, "energy used to invert to physical controls");
    analytic->add_option("--tol", ao.tol, "residual tolerance")->check(CLI::PositiveNumber);
    analytic->add_option("--out", ao.out, "output file (default stdout)");

    PropagateOpts po;
    auto* propagate = app.add_subcommand("propagate", "Propagate x(0) = e1 and write a CSV trajectory");
    propagate->add_option("--params", po.params, "JSON file with K, omega_hat, b0, bz, omega_rf, theta0")->required();
    propagate->add_option("--method", po.method, "rk4 | exact | expm-integral | full-hilbert");
    propagate->add_option("--dtau", po.dtau, "time step");
    propagate->add_option("--tau-end", po.tau_end, "final time");
    propagate->add_option("--record-every", po.record_every, "store every n-th step")->check(CLI::PositiveNumber);
    propagate->add_option("--out", po.out, "output CSV (default stdout)");

    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "Run all verification checks and print a report");
    verify->add_option("--omega-hat", vo.omega_hat, "energy, or 'auto' for the consistent value");
    verify->add_option("--k", vo.k, "coupling sign K, +1 or -1");
    verify->add_option("--closure-sets", vo.closure_sets, "random parameter sets for the closure check");
    verify->add_option("--dynamics-sets", vo.dynamics_sets, "random parameter sets for the dynamics oracles");
    verify->add_option("--dtau", vo.dtau, "step for the dynamics oracles");
    verify->add_option("--resolution", vo.resolution, "grid points per axis for the ansatz search");
    verify->add_flag("--skip-search", vo.skip_search, "skip the grid search and no-transfer probe");
    verify->add_option("--json", vo.json_out, "write the report as JSON to this file ('-' for stdout)");

    SweepOpts swo;
    auto* sweep = app.add_subcommand("sweep", "Tabulate tau*(m0, n0)");
    sweep->add_option("--max", swo.max, "upper bound for both m0 and n0");
    sweep->add_option("--m0-max", swo.m0_max, "upper bound for m0");
    sweep->add_option("--n0-max", swo.n0_max, "upper bound for n0");
    sweep->add_flag("--json", swo.as_json, "emit JSON instead of CSV");
    sweep->add_option("--out", swo.out, "output file (default stdout)");

    ScanOpts sco;
    auto* scan = app.add_subcommand("scan", "Find omega_hat where the closed-form controls meet the b, d equations");
    scan->add_option("--from", sco.from, "lower end (exclusive)");
    scan->add_option("--to", sco.to, "upper end (inclusive)");
    scan->add_option("--samples", sco.samples, "number of samples");
    scan->add_option("--k", sco.k, "coupling sign K");
    scan->add_option("--tol", sco.tol, "acceptance tolerance")->check(CLI::PositiveNumber);
    scan->add_option("--out", sco.out, "write points and residual curve as JSON");

    SearchOpts seo;
    auto* search = app.add_subcommand("search", "Grid search over the rotating-field ansatz");
    search->add_option("--target", seo.target, "x6 | x7 | x8");
    search->add_option("--omega-hat", seo.omega_hat, "energy, or 'auto'");
    search->add_option("--k", seo.k, "coupling sign K");
    search->add_option("--resolution", seo.resolution, "grid points per axis")->check(CLI::PositiveNumber);
    search->add_option("--threshold", seo.threshold, "transfer threshold")->check(CLI::PositiveNumber);
    search->add_option("--tau-max", seo.tau_max, "time horizon")->check(CLI::PositiveNumber);
    search->add_option("--dtau", seo.dtau, "scan step")->check(CLI::PositiveNumber);
    search->add_option("--refine", seo.refine, "simplex refinement iterations");
    search->add_option("--out", seo.out, "output JSON (default stdout)");

    InvertOpts io;
    auto* invert = app.add_subcommand("invert", "Solve for physical controls reaching (a, b, c+-, d = 0)");
    invert->add_option("--omega-hat", io.omega_hat, "energy");
    invert->add_option("--k", io.k, "coupling sign K");
    invert->add_option("--tau-star", io.tau_star, "transfer time");
    invert->add_option("--b-target", io.b_target, "target b (nonzero)");
    invert->add_option("--c-plus", io.c_plus, "target c+ (default K a, i.e. bz = 0)");
    invert->add_option("--r-min", io.r_min, "smallest phase index r");
    invert->add_option("--r-max", io.r_max, "largest phase index r");
    invert->add_option("--root-lo", io.root_lo, "lower end of the Omega bracket scan");
    invert->add_option("--root-hi", io.root_hi, "upper end of the Omega bracket scan");
    invert->add_option("--out", io.out, "output JSON (default stdout)");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        args.pop_back();  // program name
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*analytic) return cmd_analytic(ao);
        if (*propagate) return cmd_propagate(po);
        if (*verify) return cmd_verify(vo);
        if (*sweep) return cmd_sweep(swo);
        if (*scan) return cmd_scan(sco);
        if (*search) return cmd_search(seo);
        if (*invert) return cmd_invert(io);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}
