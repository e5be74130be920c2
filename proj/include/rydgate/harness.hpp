#pragma once

// Configuration, presets, parameter sweeps, optimization over the control
// field, scaling fits, and CSV/JSON export.

#include <iosfwd>
#include <optional>
#include <string>

#include "rydgate/dynamics.hpp"
#include "rydgate/fidelity.hpp"

namespace rydgate {

enum class Gate { atom_photon, atom_atom };
enum class Forster { f1, f1_tuned, f2, f2_tuned };

struct PhotonConfig {
    double delta_omega = 0.01;
    int quad_nodes = 64;
};

struct SweepSpec {
    std::vector<double> omega_values;  // log-spaced control Rabi frequencies
    std::vector<double> nc_values;     // log-spaced collective cooperativity targets
    Gate gate = Gate::atom_photon;
    Forster forster = Forster::f2;
    double photon_bandwidth = 0.01;
    double kappa = 10.0;
    int realizations = 8;
    std::uint64_t seed = 12345;

    void validate() const;
};

struct Config {
    PhysicsParams physics;
    CloudGeometry geometry;
    PhotonConfig photon;
    SweepSpec sweep;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Named parameter presets. fig3_right moves to (bandwidth, kappa) = (1, 30)
// and doubles the control-field axis.
Config preset(const std::string& name);
std::vector<std::string> preset_names();

// JSON config with sections physics{}, geometry{}, photon{}, sweep{}.
// Frequencies are labeled MHz and map 1:1 onto internal 1/us units; lengths
// are um. Unknown keys are errors. Sections overlay the given base config.
Config load_config(const std::string& path, Config base);
std::string config_to_json(const Config& cfg);

// Applies a Forster-resonance choice (coefficients, defect, angular model).
void apply_forster(PhysicsParams& params, Forster f);

struct SweepPoint {
    double omega = 0.0;     // control Rabi frequency
    double nc = 0.0;        // collective cooperativity target
    int n_atoms = 0;        // N = round(nc / C)
    bool valid = true;      // false when nc maps below one atom
    double fidelity_mean = 0.0;
    double fidelity_std = 0.0;
    double r_b = 0.0;       // blockade radius [um]
    double n_b = 0.0;       // mean sampled blockade count
    std::uint64_t seed = 0; // per-point base seed
    int min_realization = 0, max_realization = 0;  // extremal realization indices
    double fidelity_min = 0.0, fidelity_max = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // row-major over (omega, nc)
    std::size_t n_omega = 0, n_nc = 0;
    std::string config_json;  // resolved config echo
    std::uint64_t seed = 0;
};

// Single grid-point evaluation: mean/std gate fidelity over `realizations`
// sampled ensembles with deterministic per-realization seeds.
SweepPoint evaluate_point(const Config& cfg, double omega, double nc, int point_index);

// Full grid; OpenMP over (point, realization) tasks with a deterministic
// reduction, so results are identical for any thread count.
SweepResult run_sweep(const Config& cfg);

void write_sweep_csv(std::ostream& os, const SweepResult& result);
void write_spectrum_csv(std::ostream& os, const ReflectionSpectrum& spec);
void write_run_record(const std::string& path, const SweepResult& result);

struct OmegaMinimum {
    double omega_star = 0.0;
    double infidelity_star = 0.0;
    bool boundary = false;  // discrete minimum at grid edge or flat curve; not refined
};

// Scans f over the omega grid, then golden-section refines in log(omega)
// around an interior discrete minimum. Ties pick the leftmost grid point.
OmegaMinimum minimize_scan(const std::vector<double>& omegas,
                           const std::function<double(double)>& f);
// Production wrapper: f(omega) = mean infidelity at the given nc.
OmegaMinimum minimize_over_omega(const Config& cfg, double nc);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;  // in log10 coordinates
    double r_squared = 0.0;
};
// Least-squares line through (log10 nc, log10 infidelity); needs >= 4 points,
// all coordinates positive.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

int resolve_atom_count(double nc, const PhysicsParams& params, bool* valid);

}  // namespace rydgate
