#pragma once

// Physical parameters, atomic cloud geometry, and sampled ensemble realizations.
// Units: all rates/frequencies in 1/us (config values labeled MHz map 1:1),
// all lengths in um.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydgate {

using cplx = std::complex<double>;
using vec3 = std::array<double, 3>;

enum class AngularModel { f1, f2, isotropic };

struct PhysicsParams {
    double kappa = 10.0;        // cavity linewidth
    double gamma_e = 3.0;       // intermediate-state decay
    double gamma_r = 0.01;      // Rydberg-state decay
    double gamma_p = 0.01;      // p-state decay
    cplx omega_ctrl = 1.0;      // control Rabi frequency; only |omega_ctrl| enters
    double delta = -2.43;       // Forster defect
    double c3 = -18200.0;       // Forster coefficient [1/us * um^3], sign retained
    AngularModel angular_model = AngularModel::f2;
    double g0 = 1.0;            // peak cavity coupling
    double lambda_cav = 0.788;  // cavity wavelength [um]

    void validate() const;
    double omega_ctrl_sq() const { return std::norm(omega_ctrl); }
};

struct CloudGeometry {
    double r_c = 5.0;   // transverse cloud radius [um]
    double r_y = 20.0;  // axial cloud radius [um]
    double r_g = 15.0;  // cavity-mode waist [um]
    int n_atoms = 0;
    std::vector<vec3> qubit_positions;
    double min_separation = 1.0;  // hard exclusion radius around each qubit [um]
    std::uint64_t seed = 1;

    void validate() const;
};

// Sampled cloud with per-atom couplings. Immutable after construction except
// for excited_set, which selects the qubit subset driving the dipolar terms.
struct EnsembleRealization {
    std::vector<vec3> positions;
    std::vector<cplx> g;                 // cavity coupling per atom
    std::vector<std::vector<double>> v;  // v[j][n]: dipolar coupling, qubit j to atom n
    std::vector<int> excited_set;        // sorted qubit indices in the upper state

    std::size_t n_atoms() const { return positions.size(); }
    std::size_t n_qubits() const { return v.size(); }

    EnsembleRealization with_excited(std::vector<int> set) const;

    // sum over excited qubits of v[j][n]^2, one value per atom
    std::vector<double> excited_v2() const;
};

// Deterministic generator: mt19937_64 stream with an explicit Box-Muller
// transform so sampled positions are bit-identical for a fixed seed on any
// platform with IEEE doubles.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform();  // [0,1)
    double normal();   // standard normal

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stateless seed mixing for per-task streams (SplitMix64 finalizer chain).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

cplx cavity_coupling(const vec3& pos, const PhysicsParams& params, const CloudGeometry& geom);
double dipolar_coupling(const vec3& qubit_pos, const vec3& atom_pos, const PhysicsParams& params);

struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Draws n_atoms positions from the Gaussian cloud density (x,z std R_c/sqrt2,
// y std R_y/sqrt2), rejecting any draw closer than min_separation to a qubit,
// and fills per-atom couplings. Deterministic for fixed geom.seed.
EnsembleRealization sample_ensemble(const CloudGeometry& geom, const PhysicsParams& params);

}  // namespace rydgate
