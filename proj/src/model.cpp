#include "rydgate/model.hpp"

#include <algorithm>
#include <cmath>

namespace rydgate {

void PhysicsParams::validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
    // gamma_e = 0 is admitted so the lossless limit stays expressible; the
    // config layer requires gamma_e > 0, where the cooperativity divides by it
    if (gamma_e < 0.0) throw std::invalid_argument("gamma_e must be >= 0");
    if (gamma_r < 0.0) throw std::invalid_argument("gamma_r must be >= 0");
    if (gamma_p < 0.0) throw std::invalid_argument("gamma_p must be >= 0");
    if (!(lambda_cav > 0.0)) throw std::invalid_argument("lambda_cav must be > 0");
    if (g0 < 0.0) throw std::invalid_argument("g0 must be >= 0");
}

void CloudGeometry::validate() const {
    if (!(r_c > 0.0 && r_y > 0.0 && r_g > 0.0))
        throw std::invalid_argument("cloud radii must be > 0");
    if (n_atoms < 0) throw std::invalid_argument("n_atoms must be >= 0");
    if (min_separation < 0.0) throw std::invalid_argument("min_separation must be >= 0");
    for (std::size_t i = 0; i < qubit_positions.size(); ++i)
        for (std::size_t k = i + 1; k < qubit_positions.size(); ++k)
            if (qubit_positions[i] == qubit_positions[k])
                throw std::invalid_argument("qubit positions must be pairwise distinct");
}

EnsembleRealization EnsembleRealization::with_excited(std::vector<int> set) const {
    for (int j : set)
        if (j < 0 || static_cast<std::size_t>(j) >= n_qubits())
            throw std::invalid_argument("excited qubit index out of range");
    std::sort(set.begin(), set.end());
    EnsembleRealization out = *this;
    out.excited_set = std::move(set);
    return out;
}

std::vector<double> EnsembleRealization::excited_v2() const {
    std::vector<double> sv(n_atoms(), 0.0);
    for (int j : excited_set) {
        const auto& row = v[static_cast<std::size_t>(j)];
        for (std::size_t n = 0; n < sv.size(); ++n) sv[n] += row[n] * row[n];
    }
    return sv;
}

double Rng::uniform() {
    // 53-bit mantissa from the top bits of the 64-bit state
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {
std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix_next(s);
    s ^= a;
    h ^= splitmix_next(s);
    s ^= b;
    h ^= splitmix_next(s);
    return h;
}

cplx cavity_coupling(const vec3& pos, const PhysicsParams& params, const CloudGeometry& geom) {
    const double axial = std::sin(2.0 * M_PI * pos[1] / params.lambda_cav);
    const double transverse = std::exp(-(pos[0] * pos[0] + pos[2] * pos[2]) / (geom.r_g * geom.r_g));
    return cplx(params.g0 * axial * transverse, 0.0);
}

double dipolar_coupling(const vec3& qubit_pos, const vec3& atom_pos, const PhysicsParams& params) {
    const double dx = atom_pos[0] - qubit_pos[0];
    const double dy = atom_pos[1] - qubit_pos[1];
    const double dz = atom_pos[2] - qubit_pos[2];
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) throw std::domain_error("dipolar_coupling: zero separation");
    const double r = std::sqrt(r2);
    double f = 1.0;
    if (params.angular_model != AngularModel::isotropic) {
        // polar angle from the z-axis of the relative vector
        const double sin2 = 1.0 - (dz * dz) / r2;
        f = (params.angular_model == AngularModel::f1) ? (10.0 + 6.0 * sin2) / 9.0
                                                       : (4.0 + 6.0 * sin2) / 9.0;
    }
    return std::sqrt(f) * params.c3 / (r2 * r);
}

EnsembleRealization sample_ensemble(const CloudGeometry& geom, const PhysicsParams& params) {
    geom.validate();
    params.validate();
    EnsembleRealization out;
    out.positions.reserve(static_cast<std::size_t>(geom.n_atoms));
    Rng rng(geom.seed);

    const double sx = geom.r_c / std::sqrt(2.0);
    const double sy = geom.r_y / std::sqrt(2.0);
    const double min_sep2 = geom.min_separation * geom.min_separation;
    constexpr int kMaxTries = 100000;

    for (int n = 0; n < geom.n_atoms; ++n) {
        vec3 p{};
        int tries = 0;
        for (;;) {
            if (++tries > kMaxTries)
                throw SamplingError("sample_ensemble: qubit exclusion rejected " +
                                    std::to_string(kMaxTries) + " consecutive draws");
            p = {sx * rng.normal(), sy * rng.normal(), sx * rng.normal()};
            bool ok = true;
            for (const auto& q : geom.qubit_positions) {
                const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
                if (dx * dx + dy * dy + dz * dz < min_sep2) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
        }
        out.positions.push_back(p);
    }

    out.g.reserve(out.positions.size());
    for (const auto& p : out.positions) out.g.push_back(cavity_coupling(p, params, geom));

    out.v.resize(geom.qubit_positions.size());
    for (std::size_t j = 0; j < geom.qubit_positions.size(); ++j) {
        out.v[j].reserve(out.positions.size());
        for (const auto& p : out.positions)
            out.v[j].push_back(dipolar_coupling(geom.qubit_positions[j], p, params));
    }
    return out;
}

}  // namespace rydgate
