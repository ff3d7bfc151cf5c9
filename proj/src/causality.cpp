#include "fermi/causality.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <fmt/format.h>

namespace fermi {

namespace {

SimulationOptions simulation_options(const CausalOptions& opts) {
    SimulationOptions so;
    so.evolve = opts.evolve;
    so.evolve.store_snapshots = false;
    so.hamiltonian = opts.hamiltonian;
    const BasisState g{false, false, {}};
    const BasisState e{true, false, {}};
    switch (opts.initial_a) {
        case InitialA::Excited: so.initial = InitialKind::ExcitedAGroundB; break;
        case InitialA::Ground: so.initial = InitialKind::GroundAGroundB; break;
        case InitialA::Superposition: {
            const double h = 1.0 / std::sqrt(2.0);
            so.custom_initial = std::vector<std::pair<BasisState, cplx>>{{g, h}, {e, h}};
            break;
        }
    }
    return so;
}

double max_abs(const std::vector<double>& v, const std::vector<double>& t, double lo, double hi) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (t[i] >= lo && t[i] <= hi) m = std::max(m, std::abs(v[i]));
    }
    return m;
}

// Time at which |d| crosses `level` between samples j and j + 1.
double crossing(const std::vector<double>& t, const std::vector<double>& d, std::size_t j, double level) {
    const double a = std::abs(d[j]);
    const double b = std::abs(d[j + 1]);
    if (b == a) return t[j];
    return t[j] + (level - a) / (b - a) * (t[j + 1] - t[j]);
}

}  // namespace

InitialA initial_a_from_string(const std::string& name) {
    if (name == "g") return InitialA::Ground;
    if (name == "e") return InitialA::Excited;
    if (name == "plus") return InitialA::Superposition;
    throw ValidationError("causality.initial_a", fmt::format("unknown initial state of A '{}' (g, e, plus)", name));
}

std::string to_string(InitialA a) {
    switch (a) {
        case InitialA::Ground: return "g";
        case InitialA::Excited: return "e";
        case InitialA::Superposition: return "plus";
    }
    return "?";
}

FrontAnalysis analyze_front(const std::vector<double>& times, const std::vector<double>& delta_p, double r,
                            double front_factor, double guard) {
    if (times.size() != delta_p.size()) throw std::invalid_argument("times and series differ in length");
    FrontAnalysis f;
    f.residual = max_abs(delta_p, times, -std::numeric_limits<double>::infinity(), guard * r);
    f.peak = max_abs(delta_p, times, r, 2.0 * r);
    if (f.peak == 0.0) return f;

    const double threshold = front_factor * f.residual;
    std::size_t i0 = times.size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(delta_p[i]) > threshold) {
            i0 = i;
            break;
        }
    }
    if (i0 == times.size()) return f;
    f.detected = true;
    f.front_index = i0;
    f.front_time = times[i0];

    // first local maximum after the front that reaches half the window peak
    std::size_t ip = times.size();
    for (std::size_t i = i0; i + 1 < times.size(); ++i) {
        const double a = std::abs(delta_p[i]);
        const bool left = i == 0 || a >= std::abs(delta_p[i - 1]);
        if (left && a >= std::abs(delta_p[i + 1]) && a >= 0.5 * f.peak) {
            ip = i;
            break;
        }
    }
    if (ip == times.size()) {
        ip = i0;
        for (std::size_t i = i0; i < times.size(); ++i) {
            if (std::abs(delta_p[i]) > std::abs(delta_p[ip])) ip = i;
        }
    }
    const double top = std::abs(delta_p[ip]);
    auto last_below = [&](double level) -> std::ptrdiff_t {
        for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(ip) - 1; j >= 0; --j) {
            if (std::abs(delta_p[static_cast<std::size_t>(j)]) < level) return j;
        }
        return -1;
    };
    const auto j10 = last_below(0.1 * top);
    const auto j90 = last_below(0.9 * top);
    if (j10 < 0 || j90 < 0) return f;
    f.t10 = crossing(times, delta_p, static_cast<std::size_t>(j10), 0.1 * top);
    f.t90 = crossing(times, delta_p, static_cast<std::size_t>(j90), 0.9 * top);
    f.rise_time = f.t90 - f.t10;
    f.rise_peak_time = times[ip];
    f.rise_measured = true;
    return f;
}

std::size_t min_resolving_steps(const RunConfig& cfg, double t_max, double points_per_period) {
    const double omega = std::max(cfg.params.omega_a, cfg.params.omega_b);
    return static_cast<std::size_t>(std::ceil(t_max * omega * points_per_period - 1e-9));
}

CausalReport run_differential(const RunConfig& cfg, const TimeGrid& grid, const CausalOptions& opts) {
    check_grid(grid, cfg.disc);
    const double r = cfg.params.separation() / cfg.params.v;
    if (grid.t_max < r) {
        throw FrontUnresolved(fmt::format("front unresolved: time grid ends at {} before the light-travel time {}",
                                          grid.t_max, r));
    }
    const std::size_t need = min_resolving_steps(cfg, grid.t_max, opts.points_per_period);
    if (grid.steps < need) {
        throw FrontUnresolved(fmt::format(
            "front unresolved: {} steps over t_max = {} give dt = {}, need at least {} steps ({} points per 1/Omega)",
            grid.steps, grid.t_max, grid.dt(), need, opts.points_per_period));
    }

    const SimulationOptions so = simulation_options(opts);
    CausalReport rep;
    rep.separation = cfg.params.separation();
    ObservableSeries full;
    ObservableSeries ref;
    if (cfg.d_a == 0.0) {
        full = simulate(cfg, grid, so);
        ref = full;
        rep.notes.push_back("qubit A is uncoupled: both runs coincide and the difference vanishes identically");
    } else {
        const RunConfig cfg_ref = with_couplings(cfg, 0.0, cfg.params.k_b);
        auto job = std::async(std::launch::async, [&] { return simulate(cfg_ref, grid, so); });
        full = simulate(cfg, grid, so);
        ref = job.get();
    }
    rep.times = full.times;
    rep.p_eb_full = full.p_eb;
    rep.p_eb_ref = ref.p_eb;
    rep.delta_p.resize(rep.times.size());
    for (std::size_t i = 0; i < rep.times.size(); ++i) rep.delta_p[i] = full.p_eb[i] - ref.p_eb[i];
    for (const auto* s : {&full, &ref}) {
        for (double d : s->norm_drift) rep.max_norm_drift = std::max(rep.max_norm_drift, d);
    }
    rep.front = analyze_front(rep.times, rep.delta_p, r, opts.front_factor, opts.guard);
    if (grid.t_max < 2.0 * r) {
        rep.notes.push_back(fmt::format("post-front window truncated at t = {} (2 r / v = {})", grid.t_max, 2.0 * r));
    }
    if (cfg.d_a != 0.0 && !rep.front.detected) rep.notes.push_back("no front crossing found");
    return rep;
}

ConvergenceTable convergence_scan(const RunConfig& base, const TimeGrid& grid, const std::vector<Discretization>& ladder,
                                  const CausalOptions& opts) {
    ConvergenceTable table;
    for (Discretization disc : ladder) {
        disc.t_max = base.disc.t_max;
        const RunConfig cfg = validate(base.params, disc);
        const CausalReport rep = run_differential(cfg, grid, opts);
        ConvergenceRow row;
        row.disc = cfg.disc;
        row.mode_count = cfg.mode_count();
        row.dimension = FockBasis::predicted_dimension(cfg.mode_count(), cfg.disc.n_max);
        row.residual = rep.front.residual;
        row.peak = rep.front.peak;
        row.relative = row.peak > 0.0 ? row.residual / row.peak : 0.0;
        table.rows.push_back(row);
    }
    if (table.rows.empty()) return table;
    const double r0 = table.rows.front().residual;
    for (auto& row : table.rows) {
        if (row.residual == r0) {
            row.ratio = 1.0;
        } else {
            row.ratio = r0 > 0.0 ? row.residual / r0 : std::numeric_limits<double>::infinity();
        }
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (table.rows[i].residual > table.rows[i - 1].residual) {
            table.monotone = false;
            table.warnings.push_back(fmt::format("residual increased from {} to {} at rung {}",
                                                 table.rows[i - 1].residual, table.rows[i].residual, i));
        }
    }
    const std::size_t n = table.rows.size();
    if (n >= 3) {
        const double a = table.rows[n - 3].residual;
        const double b = table.rows[n - 2].residual;
        const double c = table.rows[n - 1].residual;
        const double den = (c - b) - (b - a);
        table.extrapolated = den != 0.0 ? c - (c - b) * (c - b) / den : c;
    } else if (n == 2) {
        const double a = table.rows[0].residual;
        const double b = table.rows[1].residual;
        table.extrapolated = a > 0.0 ? b * b / a : b;
    } else {
        table.extrapolated = r0;
    }
    return table;
}

double relative_l2(const std::vector<double>& times, const std::vector<double>& a, const std::vector<double>& b,
                   double t_end) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > t_end * (1.0 + 1e-12)) break;
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

Overlay compare_perturbative(const RunConfig& cfg, const TimeGrid& grid, const CausalOptions& opts,
                             const PerturbationOptions& popts) {
    CausalOptions o = opts;
    o.initial_a = InitialA::Excited;
    auto pert = std::async(std::launch::async, [&] { return prob_curves(cfg, grid, popts); });
    const CausalReport rep = run_differential(cfg, grid, o);
    const ProbabilityCurves curves = pert.get();

    Overlay ov;
    ov.times = rep.times;
    ov.delta_p = rep.delta_p;
    ov.p_r_eb = curves.p_r_eb;
    ov.m1_sq = curves.m1_sq;
    ov.baseline = rep.p_eb_ref;
    const double t_end = 2.0 * cfg.params.separation() / cfg.params.v;
    ov.distance = relative_l2(ov.times, ov.delta_p, ov.p_r_eb, t_end);
    ov.baseline_distance = relative_l2(ov.times, ov.baseline, ov.m1_sq, t_end);
    return ov;
}

std::vector<double> ed_joint_r_dependent(const RunConfig& cfg, const TimeGrid& grid, const CausalOptions& opts) {
    CausalOptions o = opts;
    o.initial_a = InitialA::Excited;
    const SimulationOptions so = simulation_options(o);
    const RunConfig no_b = with_couplings(cfg, cfg.params.k_a, 0.0);
    const RunConfig no_a = with_couplings(cfg, 0.0, cfg.params.k_b);
    auto only_a = std::async(std::launch::async, [&] { return simulate(no_b, grid, so); });
    auto only_b = std::async(std::launch::async, [&] { return simulate(no_a, grid, so); });
    const ObservableSeries full = simulate(cfg, grid, so);
    const ObservableSeries a = only_a.get();
    const ObservableSeries b = only_b.get();
    std::vector<double> out(full.times.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = full.p_eb_ga[i] - (1.0 - a.p_ea[i]) * b.p_eb[i];
    return out;
}

}  // namespace fermi
