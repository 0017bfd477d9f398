// pzbeam: simulation and certification front end.
//
// Exit codes: 0 success, 1 configuration/flag error, 2 simulation error,
// 3 infeasible certification.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "pzbeam/config_io.hpp"
#include "pzbeam/diagnostics.hpp"
#include "pzbeam/gains.hpp"
#include "pzbeam/integrator.hpp"
#include "pzbeam/spectral.hpp"

namespace fs = std::filesystem;
using namespace pzbeam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSimulation = 2;
constexpr int kExitInfeasible = 3;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct RunArtifacts {
    std::vector<SimState> snapshots;
    SemiDiscreteSystem system;
    EnergyTrace trace;
    std::optional<Certificate> certificate;
};

RunArtifacts run_experiment(const ExperimentConfig& cfg, long budget) {
    RunArtifacts art;
    const MaterialParams mat = cfg.material_params();
    const Grid grid = build_grid(mat.L, cfg.N);
    art.system = assemble(mat, cfg.gains, grid);

    StepperConfig sc;
    sc.dt = cfg.dt;
    sc.T = cfg.T;
    sc.snapshot_stride = cfg.snapshot_stride;
    art.snapshots = simulate(art.system, make_initial_state(art.system, cfg.ic), sc);

    if (cfg.lyapunov) {
        art.certificate =
            Certificate{*cfg.lyapunov, equivalence_constants(mat, cfg.gains, *cfg.lyapunov)};
    } else if (cfg.gains.all_positive()) {
        try {
            art.certificate = search_certificate(mat, cfg.gains, budget);
        } catch (const InfeasibleError&) {
            art.certificate = std::nullopt;
        }
    }
    art.trace = build_trace(art.system, art.snapshots, art.certificate);
    return art;
}

void write_report(const RunArtifacts& art, const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    const EnergyTrace& tr = art.trace;
    out << "pzbeam run report\n";
    out << "N = " << cfg.N << ", T = " << num6(cfg.T) << ", dt = " << num6(cfg.dt)
        << ", mismatch_scale = " << num6(cfg.ic.mismatch_scale) << "\n";
    out << "E_total(0) = " << num(tr.front().E_total) << "\n";
    out << "E_total(T) = " << num(tr.back().E_total) << "\n";
    if (tr.back().E_total > 0.0 && tr.front().E_total > 0.0 && cfg.T > 0.0) {
        const DecayFit fit = decay_fit(tr, 0.2 * cfg.T, cfg.T);
        out << "decay fit window = [" << num6(fit.t0) << ", " << num6(fit.t1) << "]\n";
        out << "fitted sigma = " << num(fit.sigma) << " 1/s, prefactor = " << num(fit.prefactor)
            << ", rms log-residual = " << num6(fit.residual) << "\n";
    }
    if (art.certificate) {
        const Certificate& c = *art.certificate;
        out << "certificate: Ce = " << num(c.params.Ce) << ", eps1 = " << num(c.params.eps1)
            << ", eps2 = " << num(c.params.eps2) << ", delta1 = " << num(c.params.delta1)
            << ", delta2 = " << num(c.params.delta2) << ", N1 = " << num(c.params.N1)
            << ", N2 = " << num(c.params.N2) << "\n";
        out << "constants: C1 = " << num(c.constants.C1) << ", C2 = " << num(c.constants.C2)
            << ", p1 = " << num(c.constants.p1) << ", p2 = " << num(c.constants.p2)
            << ", omega = " << num(c.constants.omega) << "\n";
        const BoundCheck bc = bound_check(tr, c.constants);
        out << "bound check: " << (bc.holds ? "holds" : "violated")
            << ", worst margin = " << num(bc.worst_margin) << "\n";
    } else {
        out << "certificate: none (no lyapunov section and search infeasible or gains not all positive)\n";
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<double> mismatch) {
    ExperimentConfig cfg = load_config(config_path);
    if (mismatch) cfg.ic.mismatch_scale = *mismatch;
    fs::create_directories(out_dir);

    const RunArtifacts art = run_experiment(cfg, 3136);
    write_trace(art.trace, (fs::path(out_dir) / "trace.csv").string());
    std::vector<FieldSnapshot> snaps;
    snaps.reserve(art.snapshots.size());
    for (const SimState& st : art.snapshots) snaps.push_back(split_state(art.system, st));
    write_snapshots(snaps, art.system.grid, (fs::path(out_dir) / "snapshots.csv").string());
    write_report(art, cfg, (fs::path(out_dir) / "report.txt").string());
    return kExitOk;
}

int cmd_check_gains(const std::string& config_path) {
    const ExperimentConfig cfg = load_config(config_path);
    if (!cfg.lyapunov) {
        std::cerr << "check-gains requires an explicit lyapunov section in the config\n";
        return kExitConfig;
    }
    const ConditionReport rep = check_feasibility(cfg.material_params(), cfg.gains, *cfg.lyapunov);
    std::printf("%-10s %22s %22s %6s %14s\n", "condition", "lhs", "rhs", "ok", "margin");
    for (const Condition& c : rep.rows) {
        std::printf("%-10s %22.12g %22.12g %6s %14.6g\n", c.name.c_str(), c.lhs, c.rhs,
                    c.satisfied ? "yes" : "NO", c.margin);
    }
    std::printf("feasible: %s\n", rep.feasible ? "yes" : "no");
    return kExitOk;
}

int cmd_certify(const std::string& config_path, long budget) {
    const ExperimentConfig cfg = load_config(config_path);
    const Certificate cert = search_certificate(cfg.material_params(), cfg.gains, budget);
    std::printf("certificate found\n");
    std::printf("  Ce     = %.17g\n", cert.params.Ce);
    std::printf("  eps1   = %.17g\n", cert.params.eps1);
    std::printf("  eps2   = %.17g\n", cert.params.eps2);
    std::printf("  delta1 = %.17g\n", cert.params.delta1);
    std::printf("  delta2 = %.17g\n", cert.params.delta2);
    std::printf("  N1     = %.17g\n", cert.params.N1);
    std::printf("  N2     = %.17g\n", cert.params.N2);
    std::printf("  C1     = %.17g\n", cert.constants.C1);
    std::printf("  C2     = %.17g\n", cert.constants.C2);
    std::printf("  p1     = %.17g\n", cert.constants.p1);
    std::printf("  p2     = %.17g\n", cert.constants.p2);
    std::printf("  omega  = %.17g\n", cert.constants.omega);
    return kExitOk;
}

int cmd_spectrum(const std::string& config_path, std::vector<int> n_list) {
    const ExperimentConfig cfg = load_config(config_path);
    const MaterialParams mat = cfg.material_params();
    if (n_list.empty()) n_list.push_back(cfg.N);
    std::printf("%6s %12s %22s\n", "N", "dim", "abscissa");
    for (int n : n_list) {
        const SemiDiscreteSystem sys = assemble(mat, cfg.gains, build_grid(mat.L, n));
        const SpectrumReport rep = spectral_abscissa(sys);
        std::printf("%6d %12d %22.12e\n", n, 8 * (n + 2), rep.abscissa);
    }
    return kExitOk;
}

bool apply_override(ExperimentConfig& cfg, const std::string& param, double value) {
    if (param == "gains.k1") cfg.gains.k1 = value;
    else if (param == "gains.k2") cfg.gains.k2 = value;
    else if (param == "gains.k3") cfg.gains.k3 = value;
    else if (param == "gains.k4") cfg.gains.k4 = value;
    else if (param == "gains.k5") cfg.gains.k5 = value;
    else if (param == "gains.k6") cfg.gains.k6 = value;
    else if (param == "gains.k7") cfg.gains.k7 = value;
    else if (param == "gains.k8") cfg.gains.k8 = value;
    else if (param == "observer.mismatch_scale") cfg.ic.mismatch_scale = value;
    else if (param == "ic.amplitude") cfg.ic.amplitude = value;
    else if (param == "time.T") cfg.T = value;
    else if (param == "time.dt") { cfg.dt = value; cfg.dt_specified = true; }
    else if (param == "material.rho") cfg.material.rho = value;
    else if (param == "material.mu") cfg.material.mu = value;
    else if (param == "material.alpha") cfg.material.alpha = value;
    else if (param == "material.beta") cfg.material.beta = value;
    else if (param == "material.gamma") cfg.material.gamma = value;
    else return false;
    return true;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir, int jobs) {
    const ExperimentConfig base = load_config(config_path);
    {
        ExperimentConfig probe = base;
        if (!apply_override(probe, param, 1.0)) {
            std::cerr << "unknown sweep parameter '" << param << "'\n";
            return kExitConfig;
        }
    }
    fs::create_directories(out_dir);

    struct SweepRow {
        double value = 0.0;
        double sigma = 0.0;
        bool certified = false;
        std::string trace_file;
    };
    std::vector<SweepRow> rows(values.size());

    const int njobs = std::max(1, jobs);
    std::size_t next = 0;
    while (next < values.size()) {
        std::vector<std::future<void>> batch;
        for (int j = 0; j < njobs && next < values.size(); ++j, ++next) {
            const std::size_t idx = next;
            batch.push_back(std::async(std::launch::async, [&, idx]() {
                ExperimentConfig cfg = base;
                apply_override(cfg, param, values[idx]);
                const RunArtifacts art = run_experiment(cfg, 3136);
                SweepRow row;
                row.value = values[idx];
                row.certified = art.certificate.has_value();
                const double t1 = cfg.T;
                row.sigma = decay_fit(art.trace, 0.2 * t1, t1).sigma;
                row.trace_file = "trace_" + std::to_string(idx) + ".csv";
                write_trace(art.trace, (fs::path(out_dir) / row.trace_file).string());
                rows[idx] = row;
            }));
        }
        for (auto& f : batch) f.get();  // rethrows worker errors
    }

    std::ofstream summary((fs::path(out_dir) / "summary.csv").string(), std::ios::binary);
    if (!summary) throw IoError("cannot open sweep summary for writing");
    summary << "param,value,sigma,certified,trace\n";
    std::printf("%-24s %18s %14s %10s\n", "param", "value", "sigma", "certified");
    for (const SweepRow& r : rows) {
        summary << param << ',' << num(r.value) << ',' << num(r.sigma) << ','
                << (r.certified ? 1 : 0) << ',' << r.trace_file << '\n';
        std::printf("%-24s %18.8g %14.6g %10s\n", param.c_str(), r.value, r.sigma,
                    r.certified ? "yes" : "NO");
    }
    return kExitOk;
}

int cmd_convergence(const std::string& config_path, int levels) {
    if (levels < 2) {
        std::cerr << "convergence needs at least 2 levels\n";
        return kExitConfig;
    }
    const ExperimentConfig cfg = load_config(config_path);
    const MaterialParams mat = cfg.material_params();

    struct Level {
        int N;
        SemiDiscreteSystem sys;
        SimState final_state;
    };
    std::vector<Level> lv;
    int N = cfg.N;
    double dt = cfg.dt;
    for (int l = 0; l < levels; ++l) {
        const Grid grid = build_grid(mat.L, N);
        SemiDiscreteSystem sys = assemble(mat, cfg.gains, grid);
        StepperConfig sc;
        sc.dt = dt;
        sc.T = cfg.T;
        sc.snapshot_stride = 1 << 28;  // endpoints only
        const std::vector<SimState> snaps = simulate(sys, make_initial_state(sys, cfg.ic), sc);
        lv.push_back(Level{N, std::move(sys), snaps.back()});
        N = 2 * N + 1;  // halves h exactly: h' = L/(2N+2)
        dt /= 2.0;
    }

    // Restrict a fine state to the coarse node set (every 2^k-th node) and
    // measure the difference in the coarse discrete energy norm.
    const SemiDiscreteSystem& base = lv.front().sys;
    const int nn0 = base.node_count();
    auto restrict_state = [&](const SimState& st, int nn_fine, int factor) {
        SimState out;
        out.t = st.t;
        out.u = Eigen::VectorXd::Zero(4 * nn0);
        out.v = Eigen::VectorXd::Zero(4 * nn0);
        for (int f = 0; f < 4; ++f) {
            for (int j = 0; j < nn0; ++j) {
                out.u[f * nn0 + j] = st.u[f * nn_fine + j * factor];
                out.v[f * nn0 + j] = st.v[f * nn_fine + j * factor];
            }
        }
        return out;
    };
    auto energy_norm = [&](const SimState& a, const SimState& b) {
        const Eigen::VectorXd du = a.u - b.u;
        const Eigen::VectorXd dv = a.v - b.v;
        return std::sqrt(0.5 * dv.dot(base.Mh * dv) + 0.5 * du.dot(base.Kh * du));
    };

    std::vector<double> diffs;
    std::printf("%8s %8s %22s\n", "N", "N_next", "energy-norm diff");
    for (int l = 0; l + 1 < levels; ++l) {
        const int factor_a = 1 << l;
        const int factor_b = 1 << (l + 1);
        const SimState a = restrict_state(lv[l].final_state, lv[l].sys.node_count(), factor_a);
        const SimState b =
            restrict_state(lv[l + 1].final_state, lv[l + 1].sys.node_count(), factor_b);
        diffs.push_back(energy_norm(a, b));
        std::printf("%8d %8d %22.12e\n", lv[l].N, lv[l + 1].N, diffs.back());
    }
    for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
        const double order = std::log2(diffs[i] / diffs[i + 1]);
        std::printf("observed order (levels %zu-%zu): %.3f\n", i, i + 2, order);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and stability certification of a boundary-observed "
                 "magnetizable piezoelectric beam (order-reduced finite differences)"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    double mismatch = -1.0;
    bool mismatch_set = false;
    long budget = 3136;
    std::vector<int> n_list;
    std::string sweep_param;
    std::vector<double> sweep_values;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    int levels = 3;

    CLI::App* run = app.add_subcommand("run", "simulate and write trace/snapshots/report");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--mismatch", mismatch, "override observer.mismatch_scale")
        ->each([&](const std::string&) { mismatch_set = true; });

    CLI::App* check = app.add_subcommand("check-gains", "evaluate the feasibility inequalities");
    check->add_option("--config", config_path, "config file")->required();

    CLI::App* certify = app.add_subcommand("certify", "search for a decay certificate");
    certify->add_option("--config", config_path, "config file")->required();
    certify->add_option("--budget", budget, "max candidate evaluations");

    CLI::App* spectrum = app.add_subcommand("spectrum", "closed-loop spectral abscissa per N");
    spectrum->add_option("--config", config_path, "config file")->required();
    spectrum->add_option("--N-list", n_list, "grid sizes to evaluate");

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--param", sweep_param, "config key to vary, e.g. gains.k5")->required();
    sweep->add_option("--values", sweep_values, "values to sweep")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "max parallel simulations");

    CLI::App* conv = app.add_subcommand("convergence", "self-convergence study on nested grids");
    conv->add_option("--config", config_path, "config file")->required();
    conv->add_option("--levels", levels, "number of refinement levels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, out_dir,
                           mismatch_set ? std::optional<double>(mismatch) : std::nullopt);
        }
        if (check->parsed()) return cmd_check_gains(config_path);
        if (certify->parsed()) return cmd_certify(config_path, budget);
        if (spectrum->parsed()) return cmd_spectrum(config_path, n_list);
        if (sweep->parsed()) return cmd_sweep(config_path, sweep_param, sweep_values, out_dir, jobs);
        if (conv->parsed()) return cmd_convergence(config_path, levels);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RangeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSimulation;
    }
    return kExitConfig;
}
