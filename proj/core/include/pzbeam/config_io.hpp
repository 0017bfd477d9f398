#ifndef PZBEAM_CONFIG_IO_HPP
#define PZBEAM_CONFIG_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "pzbeam/diagnostics.hpp"
#include "pzbeam/gains.hpp"
#include "pzbeam/integrator.hpp"
#include "pzbeam/model.hpp"

namespace pzbeam {

/// Parsed experiment description. Mandatory keys: material.{rho, mu, alpha,
/// beta, gamma}, geometry.L, grid.N, time.T, gains.k1..k8. Optional with
/// defaults: time.dt (h/10), time.snapshot_stride (10), ic.{amplitude, kmin,
/// kmax} (reference experiment values), observer.mismatch_scale (0). The
/// lyapunov.* group is optional as a whole; absence triggers certificate
/// search in the consumers.
struct ExperimentConfig {
    MaterialInput material;
    int N = 0;
    double T = 0.0;
    double dt = 0.0;  // effective value (default filled in at parse time)
    bool dt_specified = false;
    int snapshot_stride = 10;
    GainSet gains;
    std::optional<LyapunovParams> lyapunov;
    InitialConditions ic;  // mismatch_scale lives here

    MaterialParams material_params() const { return validate_material(material); }
};

/// Line-oriented `section.key = value` format, `#` comments. Throws
/// ParseError (syntax, unknown or duplicate keys, missing mandatory keys)
/// or RangeError (value outside its admissible range).
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::string& path);

/// Canonical form: fixed key order, 17 significant digits. parse(format(c))
/// reproduces c exactly.
std::string format_config(const ExperimentConfig& cfg);

/// Comma-separated, "\n" line ends, 17 significant digits; deterministic
/// byte output for identical inputs.
void write_trace(const EnergyTrace& trace, const std::string& path);

/// Rows (t, x, hat_w, hat_p, e1, e2) per snapshot and node, for surface plots.
void write_snapshots(const std::vector<FieldSnapshot>& snapshots, const Grid& grid,
                     const std::string& path);

}  // namespace pzbeam

#endif
