#include "rydgate/fidelity.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace rydgate {

PhotonSpectrum PhotonSpectrum::gaussian(double delta_omega, int n_nodes) {
    if (!(delta_omega > 0.0)) throw std::invalid_argument("delta_omega must be > 0");
    if (n_nodes < 2) throw std::invalid_argument("need at least 2 quadrature nodes");
    // Golub-Welsch on the Hermite recurrence: Jacobi matrix with zero diagonal
    // and off-diagonal sqrt(k/2); eigenvalues are the nodes, squared first
    // eigenvector components the weights (for the e^{-x^2} weight, normalized
    // here so they sum to exactly 1).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    for (int k = 1; k < n_nodes; ++k) {
        const double off = std::sqrt(0.5 * k);
        J(k, k - 1) = off;
        J(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss-hermite eigensolve failed");

    PhotonSpectrum ps;
    ps.delta_omega = delta_omega;
    ps.nodes.resize(static_cast<std::size_t>(n_nodes));
    ps.weights.resize(static_cast<std::size_t>(n_nodes));
    double total = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double w = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        ps.nodes[static_cast<std::size_t>(i)] = delta_omega * es.eigenvalues()(i);
        ps.weights[static_cast<std::size_t>(i)] = w;
        total += w;
    }
    for (double& w : ps.weights) w /= total;
    return ps;
}

double PhotonSpectrum::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

cplx overlap_T(const REvaluator& R, const PhotonSpectrum& photon) {
    cplx t(0.0, 0.0);
    for (std::size_t i = 0; i < photon.nodes.size(); ++i)
        t += photon.weights[i] * std::conj(R(photon.nodes[i]));
    return t;
}

namespace {
cplx interp_spectrum(const ReflectionSpectrum& spec, double omega) {
    const auto& xs = spec.grid.points;
    if (xs.empty() || omega < xs.front() || omega > xs.back())
        throw std::invalid_argument("overlap quadrature node outside the spectrum grid");
    const auto it = std::lower_bound(xs.begin(), xs.end(), omega);
    const auto hi = static_cast<std::size_t>(it - xs.begin());
    if (hi == 0) return spec.values.front();
    const std::size_t lo = hi - 1;
    if (hi == xs.size()) return spec.values.back();
    const double t = (omega - xs[lo]) / (xs[hi] - xs[lo]);
    return (1.0 - t) * spec.values[lo] + t * spec.values[hi];
}
}  // namespace

cplx overlap_T(const ReflectionSpectrum& spec, const PhotonSpectrum& photon) {
    return overlap_T([&spec](double om) { return interp_spectrum(spec, om); }, photon);
}

cplx overlap_T2(const REvaluator& R_j, const REvaluator& R_k, const PhotonSpectrum& photon) {
    cplx t(0.0, 0.0);
    for (std::size_t i = 0; i < photon.nodes.size(); ++i)
        t += photon.weights[i] * R_j(photon.nodes[i]) * std::conj(R_k(photon.nodes[i]));
    return t;
}

cplx overlap_T2(const ReflectionSpectrum& spec_j, const ReflectionSpectrum& spec_k,
                const PhotonSpectrum& photon) {
    if (spec_j.grid.points != spec_k.grid.points)
        throw std::invalid_argument("overlap_T2: spectra on different grids");
    return overlap_T2([&spec_j](double om) { return interp_spectrum(spec_j, om); },
                      [&spec_k](double om) { return interp_spectrum(spec_k, om); }, photon);
}

namespace {
GateFidelityReport clamp_report(double raw) {
    GateFidelityReport rep;
    rep.raw = raw;
    if (raw > 1.0 + 1e-10 || raw < -1e-10)
        throw std::runtime_error("fidelity outside [0,1] beyond numerical tolerance: " +
                                 std::to_string(raw));
    rep.clamped = raw > 1.0 || raw < 0.0;
    rep.value = std::min(1.0, std::max(0.0, raw));
    return rep;
}
}  // namespace

GateFidelityReport fidelity_atom_photon(cplx t_excited, cplx t_empty) {
    return clamp_report(std::norm(2.0 + t_excited - t_empty) / 16.0);
}

std::vector<int> subset_members(int subset_index) {
    switch (subset_index) {
        case 0: return {};
        case 1: return {0};
        case 2: return {1};
        case 3: return {0, 1};
        default: throw std::invalid_argument("subset index must be 0..3");
    }
}

GateFidelityReport fidelity_atom_atom(const std::array<std::array<cplx, 4>, 4>& t2,
                                      double hermitian_tol) {
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            if (std::abs(t2[j][k] - std::conj(t2[k][j])) > hermitian_tol)
                throw std::runtime_error("fidelity_atom_atom: overlap matrix is not Hermitian");
    cplx sum(0.0, 0.0);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) sum += kSubsetSign[j] * kSubsetSign[k] * t2[j][k];
    if (std::abs(sum.imag()) > 1e-10)
        throw std::runtime_error("fidelity_atom_atom: imaginary parts failed to cancel");
    return clamp_report(sum.real() / 16.0);
}

}  // namespace rydgate
