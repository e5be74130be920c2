#pragma once

// Complex reflection coefficient of the one-sided cavity: exact per-atom sum,
// homogeneous blockade approximation, and derived scales (blockade radius,
// transparency-width estimate).

#include <functional>
#include <vector>

#include "rydgate/model.hpp"

namespace rydgate {

struct FrequencyGrid {
    std::vector<double> points;  // [1/us], relative to cavity resonance, strictly increasing

    void validate() const;
    static FrequencyGrid linspace(double lo, double hi, int n);
    // default band used by the CLI: +-6 photon bandwidths, >=257 points
    static FrequencyGrid photon_band(double delta_omega, int n = 257);
};

enum class Provenance { full, approximate, oracle };

struct ReflectionSpectrum {
    FrequencyGrid grid;
    std::vector<cplx> values;
    std::vector<int> excited_set;
    Provenance provenance = Provenance::full;
    // per-point validity; only the oracle transfer function ever clears entries
    std::vector<char> valid;

    bool all_valid() const;
};

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact reflection at one frequency. g2[n] = |g_n|^2, sv[n] = sum_j v_jn^2 over
// excited qubits. Kahan-compensated accumulation keeps passivity checks
// meaningful at large N.
cplx reflection_at(const PhysicsParams& params, const std::vector<double>& g2,
                   const std::vector<double>& sv, double omega);

ReflectionSpectrum reflection_full(const EnsembleRealization& real, const PhysicsParams& params,
                                   const FrequencyGrid& grid);
// single-threaded reference implementation; bit-identical to reflection_full
ReflectionSpectrum reflection_full_serial(const EnsembleRealization& real,
                                          const PhysicsParams& params, const FrequencyGrid& grid);

// Mean response of a blockaded atom: closed form of the per-atom term averaged
// over a homogeneous sphere of radius R_B around an excited qubit. Principal
// branches throughout; continuous in omega. Requires delta != 0.
cplx f_B(double omega, const PhysicsParams& params);

// Response of an unblockaded atom under EIT; equals gamma_e times the exact
// per-atom term at zero dipolar coupling.
cplx f_E(double omega, const PhysicsParams& params);

// R = 1 - [1/2 - i*omega/kappa + f_B*N_B*C + f_E*N_E*C]^-1 with C = g0^2/(kappa*gamma_e)
ReflectionSpectrum reflection_approx(const PhysicsParams& params, int n_total, int n_blockaded,
                                     const FrequencyGrid& grid);

// Distance beyond which an excited qubit no longer breaks an atom's EIT:
// (gamma_e*C3^2 / (gamma*|Omega|^2))^(1/6), gamma = max(|delta|, gamma_p).
double blockade_radius(const PhysicsParams& params);

// Analytic estimate N_B ~ N * R_B/R_y for an elongated cloud.
double blockade_count_estimate(const PhysicsParams& params, const CloudGeometry& geom);
// Count of sampled atoms within R_B of the nearest qubit site.
int blockade_count(const EnsembleRealization& real, const CloudGeometry& geom,
                   const PhysicsParams& params);

// Predicted transparency half-width |Omega|^2/(sqrt(N)|g0|) * sqrt(kappa/gamma_e).
double eit_linewidth(const PhysicsParams& params, int n_total);

// Least-squares fit of samples (x_i, y_i) to a Lorentzian peak on a constant
// floor, y = floor + (peak-floor)/(1+(x/hw)^2); returns the fitted half-width.
struct LorentzianFit {
    double half_width = 0.0;
    double peak = 0.0;
    double floor = 0.0;
    double rms_residual = 0.0;
};
LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y);

// Fits |R(omega)|^2 of a homogeneous-coupling ensemble (V=0, gamma_r=0) with
// the Lorentzian model above, over a symmetric window around resonance sized
// by the collectively narrowed central feature.
LorentzianFit fit_reflection_halfwidth(const PhysicsParams& params, int n_total);

}  // namespace rydgate
