// Command-line front end: spectra, single-point fidelities, sweeps, the
// time-domain oracle report, and blockade estimates.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rydgate/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace rydgate;

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

int cmd_reflect(Config cfg, const std::string& out_path, const std::vector<int>& excited,
                bool approx, int blockaded, int points) {
    const PhysicsParams& params = cfg.physics;
    FrequencyGrid grid = FrequencyGrid::photon_band(cfg.photon.delta_omega, points);
    if (!excited.empty() && cfg.geometry.qubit_positions.empty())
        cfg.geometry.qubit_positions = {{0.0, 0.0, 0.0}};

    ReflectionSpectrum spec;
    if (approx) {
        int nb = blockaded;
        if (nb < 0) {
            nb = excited.empty() ? 0
                                 : static_cast<int>(
                                       std::llround(blockade_count_estimate(params, cfg.geometry)));
        }
        spec = reflection_approx(params, cfg.geometry.n_atoms, nb, grid);
    } else {
        EnsembleRealization real = sample_ensemble(cfg.geometry, params).with_excited(excited);
        spec = reflection_full(real, params, grid);
    }

    std::ofstream file;
    write_spectrum_csv(open_out(file, out_path), spec);
    return 0;
}

int cmd_fidelity(const Config& cfg, const std::string& out_path, double omega, double nc) {
    const SweepPoint p = evaluate_point(cfg, omega, nc, 0);
    if (!p.valid) {
        std::fprintf(stderr, "nc = %g maps below one atom; no fidelity computed\n", nc);
        return 1;
    }
    std::printf("gate            %s\n", cfg.sweep.gate == Gate::atom_photon ? "atom-photon" : "atom-atom");
    std::printf("omega [MHz]     %.6g\n", p.omega);
    std::printf("nc target       %.6g  (N = %d)\n", p.nc, p.n_atoms);
    std::printf("fidelity mean   %.10g\n", p.fidelity_mean);
    std::printf("fidelity std    %.3g  over %d realizations\n", p.fidelity_std,
                cfg.sweep.realizations);
    std::printf("fidelity range  [%.10g, %.10g]  (realizations %d, %d)\n", p.fidelity_min,
                p.fidelity_max, p.min_realization, p.max_realization);
    std::printf("R_B [um]        %.6g\n", p.r_b);
    std::printf("mean N_B        %.6g\n", p.n_b);
    std::printf("point seed      %llu\n", static_cast<unsigned long long>(p.seed));
    if (!out_path.empty()) {
        SweepResult res;
        res.points = {p};
        res.n_omega = res.n_nc = 1;
        res.seed = cfg.sweep.seed;
        res.config_json = config_to_json(cfg);
        std::ofstream file;
        write_sweep_csv(open_out(file, out_path), res);
    }
    return 0;
}

int cmd_sweep(const Config& cfg, const std::string& out_path) {
    const SweepResult res = run_sweep(cfg);
    std::ofstream file;
    write_sweep_csv(open_out(file, out_path), res);
    if (!out_path.empty()) {
        write_run_record(out_path + ".run.json", res);
        std::fprintf(stderr, "wrote %s and %s.run.json\n", out_path.c_str(), out_path.c_str());
    } else {
        std::fprintf(stderr, "no --out given; run record skipped\n");
    }
    return 0;
}

int cmd_oracle(Config cfg, const std::string& out_path, int n, double bandwidth) {
    cfg.geometry.n_atoms = n;
    if (cfg.geometry.qubit_positions.empty())
        cfg.geometry.qubit_positions = {{0.0, 0.0, 0.0}};

    const EnsembleRealization base = sample_ensemble(cfg.geometry, cfg.physics);
    const FrequencyGrid band = FrequencyGrid::linspace(-3.0 * bandwidth, 3.0 * bandwidth, 61);
    const PulseShape pulse = gaussian_pulse(bandwidth);
    // integrate well past the drive window; the collectively narrowed modes
    // ring down slowly and their tail belongs to the scattered record
    const double t_end = gaussian_pulse_window(bandwidth) + 120.0;

    const int n_qubits = static_cast<int>(cfg.geometry.qubit_positions.size());
    const int n_subsets = 1 << n_qubits;
    std::printf("time-domain transfer function vs closed-form reflection\n");
    std::printf("N = %d, bandwidth = %g MHz, %d frequency points\n\n", n, bandwidth,
               static_cast<int>(band.points.size()));
    std::printf("%-14s %12s %12s\n", "excited set", "max |err|", "max rel err");

    ReflectionSpectrum last;
    double worst = 0.0;
    for (int s = 0; s < n_subsets; ++s) {
        std::vector<int> members;
        for (int q = 0; q < n_qubits; ++q)
            if (s & (1 << q)) members.push_back(q);
        const EnsembleRealization real = base.with_excited(members);

        const double dt = 0.05 / max_rate(real, cfg.physics);
        const PulseRecord rec = integrate_dynamics(real, cfg.physics, pulse, t_end, dt);
        const ReflectionSpectrum oracle = transfer_function(rec, band);
        const ReflectionSpectrum full = reflection_full(real, cfg.physics, band);

        double max_abs = 0.0, max_rel = 0.0;
        for (std::size_t i = 0; i < band.points.size(); ++i) {
            if (!oracle.valid[i]) continue;
            const double err = std::abs(oracle.values[i] - full.values[i]);
            max_abs = std::max(max_abs, err);
            max_rel = std::max(max_rel, err / std::abs(full.values[i]));
        }
        std::string label = "{";
        for (std::size_t i = 0; i < members.size(); ++i)
            label += (i ? "," : "") + std::to_string(members[i]);
        label += "}";
        std::printf("%-14s %12.3e %12.3e\n", label.c_str(), max_abs, max_rel);
        worst = std::max(worst, max_rel);
        last = oracle;
    }
    std::printf("\nworst relative error: %.3e\n", worst);
    if (!out_path.empty()) {
        std::ofstream file;
        write_spectrum_csv(open_out(file, out_path), last);
    }
    return 0;
}

int cmd_blockade(const Config& cfg) {
    const PhysicsParams& p = cfg.physics;
    const double coop = p.g0 * p.g0 / (p.kappa * p.gamma_e);
    std::printf("C (per atom)    %.6g\n", coop);
    std::printf("N               %d\n", cfg.geometry.n_atoms);
    std::printf("NC              %.6g\n", coop * cfg.geometry.n_atoms);
    std::printf("R_B [um]        %.6g\n", blockade_radius(p));
    std::printf("N_B estimate    %.6g\n", blockade_count_estimate(p, cfg.geometry));
    if (!cfg.geometry.qubit_positions.empty()) {
        const EnsembleRealization real = sample_ensemble(cfg.geometry, p);
        std::printf("N_B sampled     %d  (seed %llu)\n", blockade_count(real, cfg.geometry, p),
                    static_cast<unsigned long long>(cfg.geometry.seed));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity reflection gates on a blockaded atomic ensemble"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, out_path, preset_name = "F2";
    std::uint64_t seed = 0;
    int threads = 0;
    auto* opt_config = app.add_option("--config", config_path, "JSON config file");
    auto* opt_seed = app.add_option("--seed", seed, "master seed override");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--preset", preset_name, "parameter preset")
        ->check(CLI::IsMember(rydgate::preset_names()));
    app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");

    auto* sc_reflect = app.add_subcommand("reflect", "emit a reflection spectrum R(omega)");
    std::vector<int> excited;
    bool approx = false;
    int blockaded = -1, points = 257;
    sc_reflect->add_option("--excited", excited, "excited qubit indices")->delimiter(',');
    sc_reflect->add_flag("--approx", approx, "use the homogeneous-blockade closed form");
    sc_reflect->add_option("--blockaded", blockaded, "blockaded atom count for --approx (-1 = auto)");
    sc_reflect->add_option("--points", points, "frequency grid size");

    auto* sc_fidelity = app.add_subcommand("fidelity", "single-point gate fidelity");
    double fid_omega = -1.0, fid_nc = -1.0;
    sc_fidelity->add_option("--omega", fid_omega, "control Rabi frequency [MHz]");
    sc_fidelity->add_option("--nc", fid_nc, "collective cooperativity target");

    auto* sc_sweep = app.add_subcommand("sweep", "grid sweep over (omega, NC)");

    auto* sc_oracle = app.add_subcommand("oracle", "time-domain vs closed-form comparison");
    int oracle_n = 10;
    double oracle_bw = 0.5;
    sc_oracle->add_option("--n", oracle_n, "ensemble size for the comparison");
    sc_oracle->add_option("--bandwidth", oracle_bw, "probe pulse bandwidth [MHz]");

    auto* sc_blockade = app.add_subcommand("blockade", "print R_B and N_B estimates");

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        rydgate::Config cfg = rydgate::preset(preset_name);
        if (*opt_config) cfg = rydgate::load_config(config_path, cfg);
        if (*opt_seed) {
            cfg.sweep.seed = seed;
            cfg.geometry.seed = seed;
        }

        if (*sc_reflect) return cmd_reflect(cfg, out_path, excited, approx, blockaded, points);
        if (*sc_fidelity) {
            const double coop =
                cfg.physics.g0 * cfg.physics.g0 / (cfg.physics.kappa * cfg.physics.gamma_e);
            if (fid_omega <= 0.0) fid_omega = std::abs(cfg.physics.omega_ctrl);
            if (fid_nc < 0.0) fid_nc = coop * cfg.geometry.n_atoms;
            return cmd_fidelity(cfg, out_path, fid_omega, fid_nc);
        }
        if (*sc_sweep) return cmd_sweep(cfg, out_path);
        if (*sc_oracle) return cmd_oracle(cfg, out_path, oracle_n, oracle_bw);
        if (*sc_blockade) return cmd_blockade(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
