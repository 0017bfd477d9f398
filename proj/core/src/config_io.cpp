#include "pzbeam/config_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pzbeam {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& value, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        throw ParseError("value for '" + key + "' is not a finite number: '" + value + "'", line);
    }
    return v;
}

int parse_int(const std::string& value, const std::string& key, int line) {
    const double v = parse_double(value, key, line);
    const double r = std::round(v);
    if (std::abs(v - r) > 0.0) {
        throw ParseError("value for '" + key + "' must be an integer: '" + value + "'", line);
    }
    return static_cast<int>(r);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::set<std::string> kKnownKeys = {
    "material.rho",    "material.mu",      "material.alpha", "material.beta",
    "material.gamma",  "geometry.L",       "grid.N",         "time.T",
    "time.dt",         "time.snapshot_stride",
    "gains.k1",        "gains.k2",         "gains.k3",       "gains.k4",
    "gains.k5",        "gains.k6",         "gains.k7",       "gains.k8",
    "lyapunov.Ce",     "lyapunov.eps1",    "lyapunov.eps2",  "lyapunov.delta1",
    "lyapunov.delta2", "lyapunov.N1",      "lyapunov.N2",
    "ic.amplitude",    "ic.kmin",          "ic.kmax",
    "observer.mismatch_scale",
};

const char* kMandatory[] = {
    "material.rho", "material.mu", "material.alpha", "material.beta", "material.gamma",
    "geometry.L",   "grid.N",      "time.T",         "gains.k1",      "gains.k2",
    "gains.k3",     "gains.k4",    "gains.k5",       "gains.k6",      "gains.k7",
    "gains.k8",
};

const char* kLyapunovKeys[] = {
    "lyapunov.Ce",     "lyapunov.eps1", "lyapunov.eps2", "lyapunov.delta1",
    "lyapunov.delta2", "lyapunov.N1",   "lyapunov.N2",
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'section.key = value'", lineno);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError("empty key or value", lineno);
        }
        if (kKnownKeys.find(key) == kKnownKeys.end()) {
            throw ParseError("unknown key '" + key + "'", lineno);
        }
        if (kv.count(key)) {
            throw ParseError("duplicate key '" + key + "'", lineno);
        }
        kv[key] = {value, lineno};
    }

    for (const char* req : kMandatory) {
        if (!kv.count(req)) {
            throw ParseError(std::string("missing mandatory key '") + req + "'", 0);
        }
    }

    auto get_d = [&](const std::string& key) {
        const auto& [value, line] = kv.at(key);
        return parse_double(value, key, line);
    };
    auto get_i = [&](const std::string& key) {
        const auto& [value, line] = kv.at(key);
        return parse_int(value, key, line);
    };

    ExperimentConfig cfg;
    cfg.material.rho = get_d("material.rho");
    cfg.material.mu = get_d("material.mu");
    cfg.material.alpha = get_d("material.alpha");
    cfg.material.beta = get_d("material.beta");
    cfg.material.gamma = get_d("material.gamma");
    cfg.material.L = get_d("geometry.L");
    cfg.N = get_i("grid.N");
    cfg.T = get_d("time.T");
    cfg.gains.k1 = get_d("gains.k1");
    cfg.gains.k2 = get_d("gains.k2");
    cfg.gains.k3 = get_d("gains.k3");
    cfg.gains.k4 = get_d("gains.k4");
    cfg.gains.k5 = get_d("gains.k5");
    cfg.gains.k6 = get_d("gains.k6");
    cfg.gains.k7 = get_d("gains.k7");
    cfg.gains.k8 = get_d("gains.k8");

    if (cfg.N < 2) throw RangeError("grid.N must be >= 2", "grid.N");
    if (!(cfg.material.L > 0.0)) throw RangeError("geometry.L must be > 0", "geometry.L");
    if (!(cfg.T >= 0.0)) throw RangeError("time.T must be >= 0", "time.T");
    if (!cfg.gains.all_finite_nonnegative()) {
        throw RangeError("gains must be finite and nonnegative", "gains");
    }
    // Material consistency is validated here so config errors surface with keys.
    try {
        (void)validate_material(cfg.material);
    } catch (const Error& e) {
        throw RangeError(e.what(), "material");
    }

    const double h = cfg.material.L / (cfg.N + 1);
    cfg.dt_specified = kv.count("time.dt") > 0;
    cfg.dt = cfg.dt_specified ? get_d("time.dt") : h / 10.0;
    if (!(cfg.dt > 0.0)) throw RangeError("time.dt must be > 0", "time.dt");
    cfg.snapshot_stride = kv.count("time.snapshot_stride") ? get_i("time.snapshot_stride") : 10;
    if (cfg.snapshot_stride < 1) {
        throw RangeError("time.snapshot_stride must be >= 1", "time.snapshot_stride");
    }

    cfg.ic.amplitude = kv.count("ic.amplitude") ? get_d("ic.amplitude") : 1e-3 / 25.0;
    cfg.ic.kmin = kv.count("ic.kmin") ? get_i("ic.kmin") : 5;
    cfg.ic.kmax = kv.count("ic.kmax") ? get_i("ic.kmax") : 30;
    if (cfg.ic.kmin > cfg.ic.kmax) throw RangeError("ic.kmin must be <= ic.kmax", "ic.kmin");
    if (cfg.ic.kmin < 0) throw RangeError("ic.kmin must be >= 0", "ic.kmin");
    cfg.ic.mismatch_scale =
        kv.count("observer.mismatch_scale") ? get_d("observer.mismatch_scale") : 0.0;

    int have_lyap = 0;
    for (const char* key : kLyapunovKeys) have_lyap += kv.count(key) ? 1 : 0;
    if (have_lyap == 7) {
        LyapunovParams y;
        y.Ce = get_d("lyapunov.Ce");
        y.eps1 = get_d("lyapunov.eps1");
        y.eps2 = get_d("lyapunov.eps2");
        y.delta1 = get_d("lyapunov.delta1");
        y.delta2 = get_d("lyapunov.delta2");
        y.N1 = get_d("lyapunov.N1");
        y.N2 = get_d("lyapunov.N2");
        for (double v : {y.Ce, y.eps1, y.eps2, y.delta1, y.delta2, y.N1, y.N2}) {
            if (!(v > 0.0)) throw RangeError("lyapunov parameters must be > 0", "lyapunov");
        }
        cfg.lyapunov = y;
    } else if (have_lyap != 0) {
        throw ParseError("lyapunov section must specify all of Ce, eps1, eps2, delta1, delta2, N1, N2",
                         0);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "material.rho = " << fmt(cfg.material.rho) << "\n";
    out << "material.mu = " << fmt(cfg.material.mu) << "\n";
    out << "material.alpha = " << fmt(cfg.material.alpha) << "\n";
    out << "material.beta = " << fmt(cfg.material.beta) << "\n";
    out << "material.gamma = " << fmt(cfg.material.gamma) << "\n";
    out << "geometry.L = " << fmt(cfg.material.L) << "\n";
    out << "grid.N = " << cfg.N << "\n";
    out << "time.T = " << fmt(cfg.T) << "\n";
    out << "time.dt = " << fmt(cfg.dt) << "\n";
    out << "time.snapshot_stride = " << cfg.snapshot_stride << "\n";
    const auto ks = cfg.gains.as_array();
    for (int i = 0; i < 8; ++i) {
        out << "gains.k" << (i + 1) << " = " << fmt(ks[static_cast<std::size_t>(i)]) << "\n";
    }
    if (cfg.lyapunov) {
        const LyapunovParams& y = *cfg.lyapunov;
        out << "lyapunov.Ce = " << fmt(y.Ce) << "\n";
        out << "lyapunov.eps1 = " << fmt(y.eps1) << "\n";
        out << "lyapunov.eps2 = " << fmt(y.eps2) << "\n";
        out << "lyapunov.delta1 = " << fmt(y.delta1) << "\n";
        out << "lyapunov.delta2 = " << fmt(y.delta2) << "\n";
        out << "lyapunov.N1 = " << fmt(y.N1) << "\n";
        out << "lyapunov.N2 = " << fmt(y.N2) << "\n";
    }
    out << "ic.amplitude = " << fmt(cfg.ic.amplitude) << "\n";
    out << "ic.kmin = " << cfg.ic.kmin << "\n";
    out << "ic.kmax = " << cfg.ic.kmax << "\n";
    out << "observer.mismatch_scale = " << fmt(cfg.ic.mismatch_scale) << "\n";
    return out.str();
}

void write_trace(const EnergyTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "t,E_hat,E_e,E_total,L_value,bound_value,what_wL,phat_pL,e1_0,e2_0\n";
    for (const TraceRow& r : trace) {
        out << fmt(r.t) << ',' << fmt(r.E_hat) << ',' << fmt(r.E_e) << ',' << fmt(r.E_total)
            << ',' << fmt(r.L_value) << ',' << fmt(r.bound_value) << ',' << fmt(r.what_wL) << ','
            << fmt(r.phat_pL) << ',' << fmt(r.e1_0) << ',' << fmt(r.e2_0) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_snapshots(const std::vector<FieldSnapshot>& snapshots, const Grid& grid,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "t,x,hat_w,hat_p,e1,e2\n";
    for (const FieldSnapshot& s : snapshots) {
        for (int j = 0; j < grid.node_count(); ++j) {
            out << fmt(s.t) << ',' << fmt(grid.nodes[static_cast<std::size_t>(j)]) << ','
                << fmt(s.hat_w[j]) << ',' << fmt(s.hat_p[j]) << ',' << fmt(s.e1[j]) << ','
                << fmt(s.e2[j]) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace pzbeam
