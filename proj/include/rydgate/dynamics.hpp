#pragma once

// Independent time-domain oracle: fixed-step RK4 integration of the
// single-excitation amplitude equations, input-output record, and the
// frequency-domain transfer function.

#include <functional>

#include "rydgate/reflection.hpp"

namespace rydgate {

struct PulseRecord {
    double t_start = 0.0;
    double dt = 0.0;
    std::vector<cplx> beta_in;
    std::vector<cplx> beta_out;

    std::size_t size() const { return beta_in.size(); }
    double time_at(std::size_t i) const { return t_start + dt * static_cast<double>(i); }
    // trapezoid energies
    double energy_in() const;
    double energy_out() const;
};

using PulseShape = std::function<cplx(double)>;

// Unit-energy Gaussian centered at 5/delta_omega; window [0, 10/delta_omega]
// truncates less than 1e-6 of the energy.
PulseShape gaussian_pulse(double delta_omega);
double gaussian_pulse_window(double delta_omega);

// Fastest rate of the coupled system; the integrator requires dt <= 0.1/rate.
double max_rate(const EnsembleRealization& real, const PhysicsParams& params);

// Integrates the 3N+1 linear amplitudes (excited, Rydberg, p-state per atom
// plus the cavity mode) from zero initial conditions under the drive beta_in,
// and emits beta_out = beta_in + sqrt(kappa)*C_b sampled every dt.
// Dipolar couplings enter through v_eff[n] = sqrt(sum_j v_jn^2) over the
// excited set, which leaves the input-output response identical to the full
// per-qubit chain.
PulseRecord integrate_dynamics(const EnsembleRealization& real, const PhysicsParams& params,
                               const PulseShape& beta_in, double t_end, double dt);

// System norm at the end of an integration (for energy bookkeeping tests).
struct IntegrationProbe {
    double final_system_norm = 0.0;
    // running max of (emitted + stored - injected) norm; <= 0 up to round-off
    // whenever all decay rates are nonnegative
    double max_norm_excess = 0.0;
};
PulseRecord integrate_dynamics_probed(const EnsembleRealization& real, const PhysicsParams& params,
                                      const PulseShape& beta_in, double t_end, double dt,
                                      IntegrationProbe* probe);

// Pointwise ratio of the analysis transforms of beta_out and beta_in on the
// requested band. Uses the kernel exp(+i*omega*t), the inverse of the
// amplitude expansion beta(t) = (2*pi)^(-1/2) integral domega e^(-i*omega*t).
// Points where |B_in| < floor_frac * max|B_in| are flagged invalid, not ratioed.
ReflectionSpectrum transfer_function(const PulseRecord& pulses, const FrequencyGrid& band,
                                     double floor_frac = 1e-3);

}  // namespace rydgate
