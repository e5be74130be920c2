#pragma once

// Spectral overlap functionals and state-averaged gate fidelities.

#include <array>
#include <functional>

#include "rydgate/reflection.hpp"

namespace rydgate {

// Gaussian photon spectrum |phi(omega)|^2 with bandwidth delta_omega, stored
// as a Gauss-Hermite rule in the scaled variable omega/delta_omega. Weights
// are normalized so they sum to exactly 1.
struct PhotonSpectrum {
    double delta_omega = 0.01;
    std::vector<double> nodes;    // omega values [1/us]
    std::vector<double> weights;  // sum to 1

    static PhotonSpectrum gaussian(double delta_omega, int n_nodes = 64);
    double weight_sum() const;
};

using REvaluator = std::function<cplx(double)>;

// T = integral |phi|^2 conj(R); quadrature over the stored rule.
cplx overlap_T(const REvaluator& R, const PhotonSpectrum& photon);
// Spectrum variant interpolates linearly on the grid; nodes outside the grid
// raise a coverage error rather than extrapolating.
cplx overlap_T(const ReflectionSpectrum& spec, const PhotonSpectrum& photon);

// T^j_k = integral |phi|^2 R_j conj(R_k)
cplx overlap_T2(const REvaluator& R_j, const REvaluator& R_k, const PhotonSpectrum& photon);
cplx overlap_T2(const ReflectionSpectrum& spec_j, const ReflectionSpectrum& spec_k,
                const PhotonSpectrum& photon);

struct GateFidelityReport {
    double value = 0.0;   // clamped to [0,1]
    double raw = 0.0;     // pre-clamp formula value
    bool clamped = false;
};

// F = |2 + T_excited - T_empty|^2 / 16
GateFidelityReport fidelity_atom_photon(cplx t_excited, cplx t_empty);

// Two-qubit subset index order used throughout: 0 = {}, 1 = {1}, 2 = {2}, 3 = {1,2}.
inline constexpr std::array<double, 4> kSubsetSign = {-1.0, 1.0, 1.0, 1.0};
std::vector<int> subset_members(int subset_index);

// F = (1/16) sum_jk Theta(j) Theta(k) T^j_k over the four subsets. The matrix
// must be Hermitian within tol; the imaginary residue of the sum must cancel.
GateFidelityReport fidelity_atom_atom(const std::array<std::array<cplx, 4>, 4>& t2,
                                      double hermitian_tol = 1e-8);

}  // namespace rydgate
