#include "rydgate/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace rydgate {

namespace {
constexpr const char* kVersion = "rydgate 0.1.0";

std::vector<double> geomspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::string forster_name(Forster f) {
    switch (f) {
        case Forster::f1: return "F1";
        case Forster::f1_tuned: return "F1_tuned";
        case Forster::f2: return "F2";
        case Forster::f2_tuned: return "F2_tuned";
    }
    throw std::logic_error("unreachable");
}

Forster forster_from(const std::string& s) {
    if (s == "F1") return Forster::f1;
    if (s == "F1_tuned") return Forster::f1_tuned;
    if (s == "F2") return Forster::f2;
    if (s == "F2_tuned") return Forster::f2_tuned;
    throw ConfigError("unknown forster value \"" + s + "\"");
}

std::string gate_name(Gate g) {
    return g == Gate::atom_photon ? "atom_photon" : "atom_atom";
}

Gate gate_from(const std::string& s) {
    if (s == "atom_photon") return Gate::atom_photon;
    if (s == "atom_atom") return Gate::atom_atom;
    throw ConfigError("unknown gate value \"" + s + "\"");
}

std::string angular_name(AngularModel m) {
    switch (m) {
        case AngularModel::f1: return "F1";
        case AngularModel::f2: return "F2";
        case AngularModel::isotropic: return "isotropic";
    }
    throw std::logic_error("unreachable");
}

AngularModel angular_from(const std::string& s) {
    if (s == "F1") return AngularModel::f1;
    if (s == "F2") return AngularModel::f2;
    if (s == "isotropic") return AngularModel::isotropic;
    throw ConfigError("unknown angular_model value \"" + s + "\"");
}

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace

void SweepSpec::validate() const {
    if (omega_values.empty()) throw std::invalid_argument("omega_values must be nonempty");
    for (double w : omega_values)
        if (!(w > 0.0)) throw std::invalid_argument("omega_values must be positive");
    if (nc_values.empty()) throw std::invalid_argument("nc_values must be nonempty");
    for (double nc : nc_values)
        if (!(nc >= 0.0)) throw std::invalid_argument("nc_values must be nonnegative");
    if (!(photon_bandwidth > 0.0)) throw std::invalid_argument("photon_bandwidth must be > 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("sweep kappa must be > 0");
    if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
}

void apply_forster(PhysicsParams& params, Forster f) {
    switch (f) {
        case Forster::f1:
            params.c3 = 1690.0;
            params.delta = -5.71;
            params.angular_model = AngularModel::f1;
            break;
        case Forster::f1_tuned:
            params.c3 = 1690.0;
            params.delta = 0.0;
            params.angular_model = AngularModel::f1;
            break;
        case Forster::f2:
            params.c3 = -18200.0;
            params.delta = -2.43;
            params.angular_model = AngularModel::f2;
            break;
        case Forster::f2_tuned:
            params.c3 = -18200.0;
            params.delta = 0.0;
            params.angular_model = AngularModel::f2;
            break;
    }
}

Config preset(const std::string& name) {
    Config cfg;
    cfg.geometry.n_atoms = 300;
    cfg.sweep.omega_values = geomspace(0.1, 8.0, 32);
    cfg.sweep.nc_values = geomspace(1.0, 300.0, 32);

    if (name == "F1") {
        cfg.sweep.forster = Forster::f1;
    } else if (name == "F1_tuned") {
        cfg.sweep.forster = Forster::f1_tuned;
    } else if (name == "F2") {
        cfg.sweep.forster = Forster::f2;
    } else if (name == "F2_tuned") {
        cfg.sweep.forster = Forster::f2_tuned;
    } else if (name == "fig3_right") {
        cfg.sweep.forster = Forster::f2;
        cfg.sweep.photon_bandwidth = 1.0;
        cfg.sweep.kappa = 30.0;
        cfg.photon.delta_omega = 1.0;
        cfg.physics.kappa = 30.0;
        cfg.sweep.omega_values = geomspace(0.2, 16.0, 32);
    } else {
        throw ConfigError("unknown preset \"" + name + "\"");
    }
    apply_forster(cfg.physics, cfg.sweep.forster);
    return cfg;
}

std::vector<std::string> preset_names() {
    return {"F1", "F1_tuned", "F2", "F2_tuned", "fig3_right"};
}

namespace {
using nlohmann::json;

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
    throw ConfigError("unknown key \"" + key + "\" in section \"" + section + "\"");
}

cplx read_complex(const json& v) {
    if (v.is_number()) return cplx(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2)
        return cplx(v[0].get<double>(), v[1].get<double>());
    throw ConfigError("omega_ctrl_mhz must be a number or a [re, im] pair");
}

void apply_physics(const json& j, PhysicsParams& p) {
    for (const auto& [key, v] : j.items()) {
        if (key == "kappa_mhz") p.kappa = v.get<double>();
        else if (key == "gamma_e_mhz") p.gamma_e = v.get<double>();
        else if (key == "gamma_r_mhz") p.gamma_r = v.get<double>();
        else if (key == "gamma_p_mhz") p.gamma_p = v.get<double>();
        else if (key == "omega_ctrl_mhz") p.omega_ctrl = read_complex(v);
        else if (key == "delta_mhz") p.delta = v.get<double>();
        else if (key == "c3_mhz_um3") p.c3 = v.get<double>();
        else if (key == "angular_model") p.angular_model = angular_from(v.get<std::string>());
        else if (key == "g0_mhz") p.g0 = v.get<double>();
        else if (key == "lambda_um") p.lambda_cav = v.get<double>();
        else unknown_key("physics", key);
    }
}

void apply_geometry(const json& j, CloudGeometry& g) {
    for (const auto& [key, v] : j.items()) {
        if (key == "r_c_um") g.r_c = v.get<double>();
        else if (key == "r_y_um") g.r_y = v.get<double>();
        else if (key == "r_g_um") g.r_g = v.get<double>();
        else if (key == "n_atoms") g.n_atoms = v.get<int>();
        else if (key == "min_separation_um") g.min_separation = v.get<double>();
        else if (key == "seed") g.seed = v.get<std::uint64_t>();
        else if (key == "qubit_positions_um") {
            g.qubit_positions.clear();
            for (const auto& q : v) {
                if (!q.is_array() || q.size() != 3)
                    throw ConfigError("qubit_positions_um entries must be [x, y, z]");
                g.qubit_positions.push_back(
                    {q[0].get<double>(), q[1].get<double>(), q[2].get<double>()});
            }
        } else unknown_key("geometry", key);
    }
}

void apply_photon(const json& j, PhotonConfig& p) {
    for (const auto& [key, v] : j.items()) {
        if (key == "delta_omega_mhz") p.delta_omega = v.get<double>();
        else if (key == "quad_nodes") p.quad_nodes = v.get<int>();
        else unknown_key("photon", key);
    }
}

void apply_sweep(const json& j, SweepSpec& s) {
    for (const auto& [key, v] : j.items()) {
        if (key == "omega_values_mhz") s.omega_values = v.get<std::vector<double>>();
        else if (key == "nc_values") s.nc_values = v.get<std::vector<double>>();
        else if (key == "gate") s.gate = gate_from(v.get<std::string>());
        else if (key == "forster") s.forster = forster_from(v.get<std::string>());
        else if (key == "photon_bandwidth_mhz") s.photon_bandwidth = v.get<double>();
        else if (key == "kappa_mhz") s.kappa = v.get<double>();
        else if (key == "realizations") s.realizations = v.get<int>();
        else if (key == "seed") s.seed = v.get<std::uint64_t>();
        else unknown_key("sweep", key);
    }
}
}  // namespace

Config load_config(const std::string& path, Config base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "physics") apply_physics(v, base.physics);
            else if (key == "geometry") apply_geometry(v, base.geometry);
            else if (key == "photon") apply_photon(v, base.photon);
            else if (key == "sweep") apply_sweep(v, base.sweep);
            else throw ConfigError("unknown config section \"" + key + "\"");
        }
    } catch (const json::exception& e) {
        throw ConfigError("config type error in " + path + ": " + e.what());
    }
    try {
        base.physics.validate();
        base.geometry.validate();
        base.sweep.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    if (!(base.photon.delta_omega > 0.0)) throw ConfigError("photon delta_omega_mhz must be > 0");
    if (base.photon.quad_nodes < 1) throw ConfigError("photon quad_nodes must be >= 1");
    if (!(base.physics.gamma_e > 0.0))
        throw ConfigError("physics gamma_e_mhz must be > 0 (the cooperativity divides by it)");
    return base;
}

std::string config_to_json(const Config& cfg) {
    json j;
    auto& ph = j["physics"];
    ph["kappa_mhz"] = cfg.physics.kappa;
    ph["gamma_e_mhz"] = cfg.physics.gamma_e;
    ph["gamma_r_mhz"] = cfg.physics.gamma_r;
    ph["gamma_p_mhz"] = cfg.physics.gamma_p;
    if (cfg.physics.omega_ctrl.imag() == 0.0)
        ph["omega_ctrl_mhz"] = cfg.physics.omega_ctrl.real();
    else
        ph["omega_ctrl_mhz"] = {cfg.physics.omega_ctrl.real(), cfg.physics.omega_ctrl.imag()};
    ph["delta_mhz"] = cfg.physics.delta;
    ph["c3_mhz_um3"] = cfg.physics.c3;
    ph["angular_model"] = angular_name(cfg.physics.angular_model);
    ph["g0_mhz"] = cfg.physics.g0;
    ph["lambda_um"] = cfg.physics.lambda_cav;

    auto& ge = j["geometry"];
    ge["r_c_um"] = cfg.geometry.r_c;
    ge["r_y_um"] = cfg.geometry.r_y;
    ge["r_g_um"] = cfg.geometry.r_g;
    ge["n_atoms"] = cfg.geometry.n_atoms;
    ge["qubit_positions_um"] = json::array();
    for (const auto& q : cfg.geometry.qubit_positions) ge["qubit_positions_um"].push_back(q);
    ge["min_separation_um"] = cfg.geometry.min_separation;
    ge["seed"] = cfg.geometry.seed;

    auto& po = j["photon"];
    po["delta_omega_mhz"] = cfg.photon.delta_omega;
    po["quad_nodes"] = cfg.photon.quad_nodes;

    auto& sw = j["sweep"];
    sw["omega_values_mhz"] = cfg.sweep.omega_values;
    sw["nc_values"] = cfg.sweep.nc_values;
    sw["gate"] = gate_name(cfg.sweep.gate);
    sw["forster"] = forster_name(cfg.sweep.forster);
    sw["photon_bandwidth_mhz"] = cfg.sweep.photon_bandwidth;
    sw["kappa_mhz"] = cfg.sweep.kappa;
    sw["realizations"] = cfg.sweep.realizations;
    sw["seed"] = cfg.sweep.seed;
    return j.dump(2) + "\n";
}

int resolve_atom_count(double nc, const PhysicsParams& params, bool* valid) {
    const double coop = params.g0 * params.g0 / (params.kappa * params.gamma_e);
    if (valid) *valid = true;
    if (nc == 0.0) return 0;
    const double n_exact = nc / coop;
    if (n_exact < 1.0) {
        if (valid) *valid = false;
        return 0;
    }
    return static_cast<int>(std::llround(n_exact));
}

namespace {
// Fully resolved per-grid-point inputs. Qubit placement defaults depend on the
// gate: one qubit at the origin for atom-photon, two at y = +-15 um for
// atom-atom, unless the config supplies explicit positions.
struct PointContext {
    PhysicsParams params;
    CloudGeometry geom;
    PhotonSpectrum photon;
    Gate gate;
    int realizations = 1;
    std::uint64_t sweep_seed = 0;
    bool valid = true;
    double omega = 0.0, nc = 0.0;
};

PointContext make_context(const Config& cfg, double omega, double nc) {
    PointContext ctx;
    ctx.params = cfg.physics;
    apply_forster(ctx.params, cfg.sweep.forster);
    ctx.params.kappa = cfg.sweep.kappa;
    ctx.params.omega_ctrl = omega;
    ctx.geom = cfg.geometry;
    ctx.geom.n_atoms = resolve_atom_count(nc, ctx.params, &ctx.valid);
    if (ctx.geom.qubit_positions.empty()) {
        if (cfg.sweep.gate == Gate::atom_photon)
            ctx.geom.qubit_positions = {{0.0, 0.0, 0.0}};
        else
            ctx.geom.qubit_positions = {{0.0, -15.0, 0.0}, {0.0, 15.0, 0.0}};
    }
    ctx.photon = PhotonSpectrum::gaussian(cfg.sweep.photon_bandwidth, cfg.photon.quad_nodes);
    ctx.gate = cfg.sweep.gate;
    ctx.realizations = cfg.sweep.realizations;
    ctx.sweep_seed = cfg.sweep.seed;
    ctx.omega = omega;
    ctx.nc = nc;
    return ctx;
}

void excited_sum(const EnsembleRealization& real, const std::vector<int>& members,
                 std::vector<double>& sv) {
    sv.assign(real.n_atoms(), 0.0);
    for (int j : members) {
        const auto& row = real.v[static_cast<std::size_t>(j)];
        for (std::size_t n = 0; n < sv.size(); ++n) sv[n] += row[n] * row[n];
    }
}

struct RealizationOutcome {
    double fidelity = 0.0;
    double n_b = 0.0;
};

// One sampled ensemble, one fidelity. Pure and single-threaded, so run_sweep
// may schedule these freely without changing any bit of the result.
RealizationOutcome run_realization(const PointContext& ctx, int point_index, int r) {
    CloudGeometry geom = ctx.geom;
    geom.seed = mix_seed(ctx.sweep_seed, static_cast<std::uint64_t>(point_index),
                         static_cast<std::uint64_t>(r));
    const EnsembleRealization real = sample_ensemble(geom, ctx.params);

    RealizationOutcome out;
    const double gamma = std::max(std::abs(ctx.params.delta), ctx.params.gamma_p);
    if (gamma > 0.0 && ctx.params.omega_ctrl_sq() > 0.0)
        out.n_b = static_cast<double>(blockade_count(real, geom, ctx.params));

    std::vector<double> g2(real.n_atoms());
    for (std::size_t i = 0; i < g2.size(); ++i) g2[i] = std::norm(real.g[i]);

    std::vector<double> sv;
    if (ctx.gate == Gate::atom_photon) {
        const auto t_for = [&](const std::vector<int>& members) {
            excited_sum(real, members, sv);
            return overlap_T(
                [&](double w) { return reflection_at(ctx.params, g2, sv, w); }, ctx.photon);
        };
        const cplx t_empty = t_for({});
        const cplx t_excited = t_for({0});
        out.fidelity = fidelity_atom_photon(t_excited, t_empty).value;
    } else {
        const std::size_t nn = ctx.photon.nodes.size();
        std::array<std::vector<cplx>, 4> spectra;
        for (int s = 0; s < 4; ++s) {
            excited_sum(real, subset_members(s), sv);
            spectra[static_cast<std::size_t>(s)].resize(nn);
            for (std::size_t i = 0; i < nn; ++i)
                spectra[static_cast<std::size_t>(s)][i] =
                    reflection_at(ctx.params, g2, sv, ctx.photon.nodes[i]);
        }
        std::array<std::array<cplx, 4>, 4> t2{};
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                cplx acc(0.0, 0.0);
                for (std::size_t i = 0; i < nn; ++i)
                    acc += ctx.photon.weights[i] * spectra[static_cast<std::size_t>(j)][i] *
                           std::conj(spectra[static_cast<std::size_t>(k)][i]);
                t2[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = acc;
            }
        out.fidelity = fidelity_atom_atom(t2).value;
    }
    return out;
}

// Ordered, serial aggregation; shared by evaluate_point and run_sweep so both
// produce identical bytes.
SweepPoint reduce_point(const PointContext& ctx, int point_index,
                        const std::vector<RealizationOutcome>& outs) {
    SweepPoint p;
    p.omega = ctx.omega;
    p.nc = ctx.nc;
    p.n_atoms = ctx.geom.n_atoms;
    p.valid = ctx.valid;
    p.seed = mix_seed(ctx.sweep_seed, static_cast<std::uint64_t>(point_index), 0);
    const double gamma = std::max(std::abs(ctx.params.delta), ctx.params.gamma_p);
    if (ctx.params.omega_ctrl_sq() > 0.0 && gamma > 0.0 && ctx.params.c3 != 0.0)
        p.r_b = blockade_radius(ctx.params);
    if (!ctx.valid) {
        p.fidelity_mean = p.fidelity_std = p.fidelity_min = p.fidelity_max = 0.0;
        return p;
    }
    double sum = 0.0, nb = 0.0;
    p.fidelity_min = outs.front().fidelity;
    p.fidelity_max = outs.front().fidelity;
    for (std::size_t r = 0; r < outs.size(); ++r) {
        const double f = outs[r].fidelity;
        sum += f;
        nb += outs[r].n_b;
        if (f < p.fidelity_min) {
            p.fidelity_min = f;
            p.min_realization = static_cast<int>(r);
        }
        if (f > p.fidelity_max) {
            p.fidelity_max = f;
            p.max_realization = static_cast<int>(r);
        }
    }
    const auto nr = static_cast<double>(outs.size());
    p.fidelity_mean = sum / nr;
    p.n_b = nb / nr;
    if (outs.size() > 1) {
        double ss = 0.0;
        for (const auto& o : outs) {
            const double d = o.fidelity - p.fidelity_mean;
            ss += d * d;
        }
        p.fidelity_std = std::sqrt(ss / (nr - 1.0));
    }
    return p;
}
}  // namespace

SweepPoint evaluate_point(const Config& cfg, double omega, double nc, int point_index) {
    cfg.sweep.validate();
    const PointContext ctx = make_context(cfg, omega, nc);
    if (!ctx.valid) return reduce_point(ctx, point_index, {});
    std::vector<RealizationOutcome> outs(static_cast<std::size_t>(ctx.realizations));
    for (int r = 0; r < ctx.realizations; ++r)
        outs[static_cast<std::size_t>(r)] = run_realization(ctx, point_index, r);
    return reduce_point(ctx, point_index, outs);
}

SweepResult run_sweep(const Config& cfg) {
    cfg.sweep.validate();
    const auto n_omega = cfg.sweep.omega_values.size();
    const auto n_nc = cfg.sweep.nc_values.size();
    const auto n_points = n_omega * n_nc;
    const auto nr = static_cast<std::size_t>(cfg.sweep.realizations);

    std::vector<PointContext> ctxs;
    ctxs.reserve(n_points);
    for (std::size_t io = 0; io < n_omega; ++io)
        for (std::size_t ic = 0; ic < n_nc; ++ic)
            ctxs.push_back(make_context(cfg, cfg.sweep.omega_values[io], cfg.sweep.nc_values[ic]));

    struct Task {
        int point;
        int realization;
    };
    std::vector<Task> tasks;
    tasks.reserve(n_points * nr);
    for (std::size_t p = 0; p < n_points; ++p) {
        if (!ctxs[p].valid) continue;
        for (std::size_t r = 0; r < nr; ++r)
            tasks.push_back({static_cast<int>(p), static_cast<int>(r)});
    }

    std::vector<RealizationOutcome> outcomes(n_points * nr);
    // exceptions may not cross the parallel region; keep the one from the
    // lowest task index so failures are reported deterministically
    std::exception_ptr failure;
    std::ptrdiff_t failure_index = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks.size()); ++t) {
        try {
            const Task tk = tasks[static_cast<std::size_t>(t)];
            outcomes[static_cast<std::size_t>(tk.point) * nr +
                     static_cast<std::size_t>(tk.realization)] =
                run_realization(ctxs[static_cast<std::size_t>(tk.point)], tk.point, tk.realization);
        } catch (...) {
#pragma omp critical(rydgate_sweep_failure)
            if (t < failure_index) {
                failure_index = t;
                failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);

    SweepResult result;
    result.n_omega = n_omega;
    result.n_nc = n_nc;
    result.seed = cfg.sweep.seed;
    result.config_json = config_to_json(cfg);
    result.points.reserve(n_points);
    std::vector<RealizationOutcome> slice(nr);
    for (std::size_t p = 0; p < n_points; ++p) {
        if (!ctxs[p].valid) {
            result.points.push_back(reduce_point(ctxs[p], static_cast<int>(p), {}));
            continue;
        }
        for (std::size_t r = 0; r < nr; ++r) slice[r] = outcomes[p * nr + r];
        result.points.push_back(reduce_point(ctxs[p], static_cast<int>(p), slice));
    }
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "omega_mhz,nc,n_atoms,fidelity_mean,fidelity_std,r_b_um,n_b,seed\n";
    const double nan = std::nan("");
    for (const auto& p : result.points) {
        os << fmt17(p.omega) << ',' << fmt17(p.nc) << ',' << p.n_atoms << ','
           << fmt17(p.valid ? p.fidelity_mean : nan) << ','
           << fmt17(p.valid ? p.fidelity_std : nan) << ',' << fmt17(p.r_b) << ','
           << fmt17(p.valid ? p.n_b : nan) << ',' << p.seed << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const ReflectionSpectrum& spec) {
    os << "omega,re_R,im_R,abs_R,arg_R\n";
    const double nan = std::nan("");
    for (std::size_t i = 0; i < spec.grid.points.size(); ++i) {
        const bool ok = spec.valid.empty() || spec.valid[i] != 0;
        const cplx v = spec.values[i];
        os << fmt17(spec.grid.points[i]) << ',' << fmt17(ok ? v.real() : nan) << ','
           << fmt17(ok ? v.imag() : nan) << ',' << fmt17(ok ? std::abs(v) : nan) << ','
           << fmt17(ok ? std::arg(v) : nan) << '\n';
    }
}

void write_run_record(const std::string& path, const SweepResult& result) {
    json rec;
    rec["code_version"] = kVersion;
    rec["config"] = json::parse(result.config_json);
    rec["seed"] = result.seed;
    rec["n_omega"] = result.n_omega;
    rec["n_nc"] = result.n_nc;
    rec["points"] = json::array();
    for (const auto& p : result.points) {
        json jp;
        jp["omega_mhz"] = p.omega;
        jp["nc"] = p.nc;
        jp["n_atoms"] = p.n_atoms;
        jp["valid"] = p.valid;
        jp["r_b_um"] = p.r_b;
        jp["seed"] = p.seed;
        if (p.valid) {
            jp["fidelity_mean"] = p.fidelity_mean;
            jp["fidelity_std"] = p.fidelity_std;
            jp["fidelity_min"] = p.fidelity_min;
            jp["fidelity_max"] = p.fidelity_max;
            jp["min_realization"] = p.min_realization;
            jp["max_realization"] = p.max_realization;
            jp["n_b"] = p.n_b;
        }
        rec["points"].push_back(std::move(jp));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << rec.dump(2) << "\n";
}

OmegaMinimum minimize_scan(const std::vector<double>& omegas,
                           const std::function<double(double)>& f) {
    if (omegas.empty()) throw std::invalid_argument("minimize_scan: empty grid");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0)) throw std::invalid_argument("minimize_scan: omegas must be > 0");
        if (i > 0 && !(omegas[i] > omegas[i - 1]))
            throw std::invalid_argument("minimize_scan: omegas must be increasing");
    }
    std::vector<double> vals(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) vals[i] = f(omegas[i]);

    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] < vals[best]) best = i;

    OmegaMinimum m;
    m.omega_star = omegas[best];
    m.infidelity_star = vals[best];
    if (best == 0 || best + 1 == omegas.size()) {
        m.boundary = true;
        return m;
    }

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(omegas[best - 1]), b = std::log(omegas[best + 1]);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(std::exp(c)), fd = f(std::exp(d));
    for (int it = 0; it < 80 && (b - a) > 1e-10; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(std::exp(d));
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(std::exp(xm));
    if (fm <= m.infidelity_star) {
        m.omega_star = std::exp(xm);
        m.infidelity_star = fm;
    }
    return m;
}

OmegaMinimum minimize_over_omega(const Config& cfg, double nc) {
    cfg.sweep.validate();
    const auto& om = cfg.sweep.omega_values;
    if (om.size() < 2 || om.back() < 10.0 * om.front() * (1.0 - 1e-12))
        throw ConfigError("minimize_over_omega: omega grid must span at least one decade");
    // Common random numbers: every omega reuses the point-0 seed stream, so
    // the scanned curve is a deterministic smooth function of omega.
    return minimize_scan(om, [&](double w) {
        const SweepPoint p = evaluate_point(cfg, w, nc, 0);
        if (!p.valid)
            throw ConfigError("minimize_over_omega: nc target maps below one atom");
        return 1.0 - p.fidelity_mean;
    });
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) throw std::invalid_argument("fit_scaling: need at least 4 points");
    for (const auto& [x, y] : points)
        if (!(x > 0.0) || !(y > 0.0))
            throw std::domain_error("fit_scaling: all coordinates must be positive");
    const auto n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double lx = std::log10(x), ly = std::log10(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::domain_error("fit_scaling: degenerate abscissae");
    ScalingFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (const auto& [x, y] : points) {
        const double ly = std::log10(y);
        const double pred = fit.intercept + fit.slope * std::log10(x);
        ss_res += (ly - pred) * (ly - pred);
        ss_tot += (ly - mean_y) * (ly - mean_y);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

}  // namespace rydgate
