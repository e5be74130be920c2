#include "rydgate/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rydgate {

void FrequencyGrid::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) throw std::invalid_argument("frequency grid not finite");
        if (i > 0 && !(points[i] > points[i - 1]))
            throw std::invalid_argument("frequency grid must be strictly increasing");
    }
}

FrequencyGrid FrequencyGrid::linspace(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("bad linspace grid");
    FrequencyGrid g;
    g.points.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g.points[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return g;
}

FrequencyGrid FrequencyGrid::photon_band(double delta_omega, int n) {
    return linspace(-6.0 * delta_omega, 6.0 * delta_omega, std::max(n, 257));
}

bool ReflectionSpectrum::all_valid() const {
    return std::all_of(valid.begin(), valid.end(), [](char c) { return c != 0; });
}

namespace {
// Per-atom response term a_n. Rationalized so the EIT limit (gamma_r=0,
// omega=0 -> a_n = 0) and the strong-blockade limit are exact without
// intermediate infinities:
//   a = (Rr*P + S) / (E*(Rr*P + S) + |Omega|^2 * P),   S = sum_j V_jn^2
// with Rr = gamma_r/2 - i*omega, E = gamma_e/2 - i*omega,
// P = gamma_p/2 + i*(delta - omega). For S = 0 the P factor cancels:
//   a = Rr / (E*Rr + |Omega|^2).
inline cplx atom_term(double omega, double sv, double gamma_e, double gamma_r, double gamma_p,
                      double delta, double om2) {
    const cplx Rr(0.5 * gamma_r, -omega);
    const cplx E(0.5 * gamma_e, -omega);
    if (sv == 0.0) return Rr / (E * Rr + om2);
    const cplx P(0.5 * gamma_p, delta - omega);
    const cplx num = Rr * P + sv;
    return num / (E * num + om2 * P);
}

inline void kahan_add(cplx& sum, cplx& comp, cplx term) {
    const cplx y = term - comp;
    const cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}
}  // namespace

cplx reflection_at(const PhysicsParams& params, const std::vector<double>& g2,
                   const std::vector<double>& sv, double omega) {
    const double om2 = params.omega_ctrl_sq();
    cplx sum(0.0, 0.0), comp(0.0, 0.0);
    for (std::size_t n = 0; n < g2.size(); ++n) {
        const cplx a = atom_term(omega, sv.empty() ? 0.0 : sv[n], params.gamma_e, params.gamma_r,
                                 params.gamma_p, params.delta, om2);
        kahan_add(sum, comp, g2[n] * a);
    }
    if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag()))
        throw SingularityError("reflection_at: singular atomic response at omega = " +
                               std::to_string(omega));
    const cplx denom = cplx(0.5 * params.kappa, -omega) + sum;
    if (denom == cplx(0.0, 0.0))
        throw SingularityError("reflection_at: zero denominator at omega = " +
                               std::to_string(omega));
    return 1.0 - params.kappa / denom;
}

namespace {
ReflectionSpectrum eval_spectrum(const EnsembleRealization& real, const PhysicsParams& params,
                                 const FrequencyGrid& grid, bool parallel) {
    grid.validate();
    params.validate();
    std::vector<double> g2(real.n_atoms());
    for (std::size_t n = 0; n < g2.size(); ++n) g2[n] = std::norm(real.g[n]);
    const std::vector<double> sv = real.excited_v2();

    ReflectionSpectrum spec;
    spec.grid = grid;
    spec.excited_set = real.excited_set;
    spec.provenance = Provenance::full;
    spec.values.resize(grid.points.size());
    spec.valid.assign(grid.points.size(), 1);

    const auto npts = static_cast<std::ptrdiff_t>(grid.points.size());
    // exceptions may not cross the parallel region; keep the one from the
    // lowest frequency index so failures are reported deterministically
    std::exception_ptr failure;
    std::ptrdiff_t failure_index = npts;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::ptrdiff_t i = 0; i < npts; ++i) {
        try {
            const auto k = static_cast<std::size_t>(i);
            spec.values[k] = reflection_at(params, g2, sv, grid.points[k]);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(rydgate_spectrum_failure)
#endif
            if (i < failure_index) {
                failure_index = i;
                failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    (void)parallel;
    return spec;
}
}  // namespace

ReflectionSpectrum reflection_full(const EnsembleRealization& real, const PhysicsParams& params,
                                   const FrequencyGrid& grid) {
    return eval_spectrum(real, params, grid, true);
}

ReflectionSpectrum reflection_full_serial(const EnsembleRealization& real,
                                          const PhysicsParams& params, const FrequencyGrid& grid) {
    return eval_spectrum(real, params, grid, false);
}

cplx f_B(double omega, const PhysicsParams& params) {
    if (params.delta == 0.0)
        throw std::domain_error("f_B: closed form requires a nonzero defect; "
                                "use the exact per-atom sum instead");
    const double gamma = std::max(std::abs(params.delta), params.gamma_p);
    const cplx E(0.5 * params.gamma_e, -omega);
    const cplx P(0.5 * params.gamma_p, params.delta - omega);
    // X^2 = gamma_e * P / (gamma * E); arctan(X)/X is even in X, so the
    // square-root branch is immaterial. Principal branches throughout.
    const cplx X2 = params.gamma_e * P / (gamma * E);
    const cplx X = std::sqrt(X2);
    cplx ratio;
    if (std::abs(X) < 1e-2) {
        // series of arctan(X)/X, keeps full precision where X -> 0
        ratio = 1.0 - X2 / 3.0 + X2 * X2 / 5.0;
    } else {
        ratio = std::atan(X) / X;
    }
    return params.gamma_e / E * ratio;
}

cplx f_E(double omega, const PhysicsParams& params) {
    const double om2 = params.omega_ctrl_sq();
    // i*gamma_e*(2*omega + i*gamma_r) / [(i*gamma_e/2 + omega)(2*omega + i*gamma_r) - 2|Omega|^2]
    const cplx two_rr(2.0 * omega, params.gamma_r);
    const cplx denom = cplx(omega, 0.5 * params.gamma_e) * two_rr - 2.0 * om2;
    if (denom == cplx(0.0, 0.0))
        throw SingularityError("f_E: zero denominator at omega = " + std::to_string(omega));
    return cplx(0.0, params.gamma_e) * two_rr / denom;
}

ReflectionSpectrum reflection_approx(const PhysicsParams& params, int n_total, int n_blockaded,
                                     const FrequencyGrid& grid) {
    if (n_blockaded < 0 || n_blockaded > n_total)
        throw std::invalid_argument("reflection_approx: need 0 <= n_blockaded <= n_total");
    grid.validate();
    params.validate();
    const double coop = params.g0 * params.g0 / (params.kappa * params.gamma_e);
    const double nb = static_cast<double>(n_blockaded);
    const double ne = static_cast<double>(n_total - n_blockaded);

    ReflectionSpectrum spec;
    spec.grid = grid;
    spec.provenance = Provenance::approximate;
    spec.values.resize(grid.points.size());
    spec.valid.assign(grid.points.size(), 1);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const double om = grid.points[i];
        cplx denom = cplx(0.5, -om / params.kappa) + f_E(om, params) * ne * coop;
        if (nb > 0.0) denom += f_B(om, params) * nb * coop;
        if (denom == cplx(0.0, 0.0))
            throw SingularityError("reflection_approx: zero denominator at omega = " +
                                   std::to_string(om));
        spec.values[i] = 1.0 - 1.0 / denom;
    }
    return spec;
}

double blockade_radius(const PhysicsParams& params) {
    const double om2 = params.omega_ctrl_sq();
    const double gamma = std::max(std::abs(params.delta), params.gamma_p);
    if (om2 == 0.0 || gamma == 0.0)
        throw std::domain_error("blockade_radius: requires Omega != 0 and max(|delta|,gamma_p) > 0");
    const double c32 = params.c3 * params.c3;
    return std::pow(params.gamma_e * c32 / (gamma * om2), 1.0 / 6.0);
}

double blockade_count_estimate(const PhysicsParams& params, const CloudGeometry& geom) {
    return static_cast<double>(geom.n_atoms) * blockade_radius(params) / geom.r_y;
}

int blockade_count(const EnsembleRealization& real, const CloudGeometry& geom,
                   const PhysicsParams& params) {
    if (geom.qubit_positions.empty()) return 0;
    const double rb2 = blockade_radius(params) * blockade_radius(params);
    int count = 0;
    for (const auto& p : real.positions) {
        for (const auto& q : geom.qubit_positions) {
            const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
            if (dx * dx + dy * dy + dz * dz < rb2) {
                ++count;
                break;
            }
        }
    }
    return count;
}

double eit_linewidth(const PhysicsParams& params, int n_total) {
    if (n_total <= 0 || params.g0 <= 0.0)
        throw std::domain_error("eit_linewidth: requires N > 0 and g0 > 0");
    return params.omega_ctrl_sq() / (std::sqrt(static_cast<double>(n_total)) * params.g0) *
           std::sqrt(params.kappa / params.gamma_e);
}

LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("fit_lorentzian: need >= 4 matched samples");
    // For fixed half-width hw the model is linear in (floor, amplitude); scan
    // hw on a log grid spanning the sample range, then golden-section refine.
    const double xmax = *std::max_element(x.begin(), x.end());
    double xmin_pos = xmax;
    for (double v : x)
        if (v > 0.0) xmin_pos = std::min(xmin_pos, v);

    const auto solve = [&](double hw, LorentzianFit* out) {
        // basis b_i = 1/(1+(x_i/hw)^2); least squares y ~ c0 + c1*b
        double sb = 0, sbb = 0, sy = 0, sby = 0;
        const double n = static_cast<double>(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double b = 1.0 / (1.0 + (x[i] / hw) * (x[i] / hw));
            sb += b;
            sbb += b * b;
            sy += y[i];
            sby += b * y[i];
        }
        const double det = n * sbb - sb * sb;
        const double c1 = (n * sby - sb * sy) / det;
        const double c0 = (sy - c1 * sb) / n;
        double sse = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double b = 1.0 / (1.0 + (x[i] / hw) * (x[i] / hw));
            const double r = y[i] - (c0 + c1 * b);
            sse += r * r;
        }
        if (out) {
            out->half_width = hw;
            out->floor = c0;
            out->peak = c0 + c1;
            out->rms_residual = std::sqrt(sse / n);
        }
        return sse;
    };

    const double llo = std::log(0.5 * xmin_pos), lhi = std::log(2.0 * xmax);
    int best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    constexpr int kScan = 200;
    for (int i = 0; i < kScan; ++i) {
        const double hw = std::exp(llo + (lhi - llo) * i / (kScan - 1));
        const double sse = solve(hw, nullptr);
        if (sse < best_sse) {
            best_sse = sse;
            best = i;
        }
    }
    double a = llo + (lhi - llo) * std::max(best - 1, 0) / (kScan - 1);
    double b = llo + (lhi - llo) * std::min(best + 1, kScan - 1) / (kScan - 1);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = solve(std::exp(c), nullptr), fd = solve(std::exp(d), nullptr);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = solve(std::exp(c), nullptr);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = solve(std::exp(d), nullptr);
        }
    }
    LorentzianFit fit;
    solve(std::exp(0.5 * (a + b)), &fit);
    return fit;
}

LorentzianFit fit_reflection_halfwidth(const PhysicsParams& params, int n_total) {
    PhysicsParams p = params;
    p.gamma_r = 0.0;
    // The central reflectivity feature is collectively narrowed to about
    // kappa*|Omega|^2 / (2*N*g0^2); sample ten of those half-widths so the
    // floor on either side is well represented.
    const double narrowed =
        p.kappa * p.omega_ctrl_sq() / (2.0 * n_total * p.g0 * p.g0);
    const int m = 400;
    std::vector<double> x(m), y(m);
    const std::vector<double> g2(static_cast<std::size_t>(n_total), p.g0 * p.g0);
    const std::vector<double> sv(static_cast<std::size_t>(n_total), 0.0);
    for (int i = 0; i < m; ++i) {
        x[static_cast<std::size_t>(i)] = 10.0 * narrowed * (i + 1) / m;
        const cplx R = reflection_at(p, g2, sv, x[static_cast<std::size_t>(i)]);
        y[static_cast<std::size_t>(i)] = std::norm(R);
    }
    return fit_lorentzian(x, y);
}

}  // namespace rydgate
