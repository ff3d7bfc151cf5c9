#include "fermi/expdesign.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "fermi/csv.hpp"
#include "fermi/dynamics.hpp"

namespace fermi {

namespace {

constexpr double kPi = std::numbers::pi;

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (const auto& it : items) s += (s.empty() ? "" : ", ") + it;
    return s;
}

FluxQubitParams flux_params(const QubitDesign& d) {
    FluxQubitParams p;
    p.persistent_current = *d.persistent_current_a;
    p.gap = 2.0 * kPi * *d.gap_hz;
    p.flux_offset = *d.flux_offset_wb;
    p.ramp_rate = *d.ramp_wb_per_s;
    return p;
}

DesignCheck upper_bound(std::string name, double value, double limit, std::string rule) {
    DesignCheck c{std::move(name), value < limit, value, limit, value > 0.0 ? limit / value : HUGE_VAL, std::move(rule)};
    return c;
}

DesignCheck lower_bound(std::string name, double value, double limit, std::string rule) {
    DesignCheck c{std::move(name), value >= limit, value, limit, limit > 0.0 ? value / limit : HUGE_VAL,
                  std::move(rule)};
    return c;
}

}  // namespace

void check(const FluxQubitParams& p) {
    std::vector<Issue> issues;
    if (!(p.persistent_current > 0.0)) issues.push_back({"persistent_current", "must be positive"});
    if (!(p.gap > 0.0)) issues.push_back({"gap", "must be positive"});
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

double omega_from_flux(const FluxQubitParams& p, double hbar) {
    const double eps = 2.0 * p.persistent_current * p.flux_offset / hbar;
    return std::hypot(eps, p.gap);
}

double flux_from_omega(double omega, const FluxQubitParams& p, double hbar) {
    if (omega < p.gap) {
        throw std::domain_error(fmt::format("frequency {} below the gap {} has no flux offset", omega, p.gap));
    }
    if (!(p.persistent_current > 0.0)) throw std::domain_error("persistent current must be positive");
    // (omega - gap)(omega + gap) keeps precision near the degeneracy point
    const double eps = std::sqrt((omega - p.gap) * (omega + p.gap));
    return eps * hbar / (2.0 * p.persistent_current);
}

double coupling_ratio(double g, double omega) {
    if (!(omega > 0.0)) throw std::domain_error("qubit frequency must be positive");
    const double x = g / omega;
    return 2.0 * x * x;
}

double g_from_K(double k, double omega) {
    if (k < 0.0) throw std::domain_error("coupling ratio must be non-negative");
    return omega * std::sqrt(0.5 * k);
}

double lz_exponent(double alpha, const FluxQubitParams& p, double hbar) {
    if (!(alpha > 0.0)) throw std::domain_error("ramp rate must be positive");
    return kPi * hbar * p.gap * p.gap / (4.0 * p.persistent_current * alpha);
}

double lz_stay_probability(double alpha, const FluxQubitParams& p, double hbar) {
    return std::exp(-lz_exponent(alpha, p, hbar));
}

double adiabatic_rate_scale(const FluxQubitParams& p, double hbar) {
    return kPi * hbar * p.gap * p.gap / (4.0 * p.persistent_current);
}

double diabatic_rate_scale(const FluxQubitParams& p, double hbar) {
    return hbar * p.gap * p.gap / (2.0 * p.persistent_current);
}

SweepResult lz_sweep_numeric(double exponent, const SweepOptions& opts) {
    namespace ode = boost::numeric::odeint;
    if (!(exponent > 0.0)) throw std::domain_error("Landau-Zener exponent must be positive");
    using State = std::array<double, 4>;   // Re a, Im a, Re b, Im b
    const double beta = kPi / (2.0 * exponent);
    const double crossing_time = std::max(1.0 / beta, 1.0 / std::sqrt(beta));
    const double T = opts.window * crossing_time;

    auto rhs = [beta](const State& x, State& dx, double t) {
        const double e = beta * t;
        const double h0r = 0.5 * (e * x[0] + x[2]), h0i = 0.5 * (e * x[1] + x[3]);
        const double h1r = 0.5 * (x[0] - e * x[2]), h1i = 0.5 * (x[1] - e * x[3]);
        dx = {h0i, -h0r, h1i, -h1r};
    };
    // adiabatic eigenvectors of 1/2 (eps sigma_z + sigma_x)
    auto upper = [](double eps) {
        const double th = std::atan2(1.0, eps);
        return std::array<double, 2>{std::cos(0.5 * th), std::sin(0.5 * th)};
    };
    auto lower = [](double eps) {
        const double th = std::atan2(1.0, eps);
        return std::array<double, 2>{-std::sin(0.5 * th), std::cos(0.5 * th)};
    };
    const auto l0 = lower(-beta * T);
    State x{l0[0], 0.0, l0[1], 0.0};
    auto stepper = ode::make_controlled(opts.tol, opts.tol, ode::runge_kutta_dopri5<State>());
    const std::size_t steps = ode::integrate_adaptive(stepper, rhs, x, -T, T, 0.01 * crossing_time);
    const auto u = upper(beta * T);
    const double re = u[0] * x[0] + u[1] * x[2];
    const double im = u[0] * x[1] + u[1] * x[3];
    return {re * re + im * im, T, steps};
}

double thermal_occupancy(double freq_hz, double temperature_k) {
    if (!(freq_hz > 0.0)) throw std::domain_error("frequency must be positive");
    if (temperature_k < 0.0) throw std::domain_error("temperature must be non-negative");
    if (temperature_k == 0.0) return 0.0;
    const double x = kPlanck * freq_hz / (kBoltzmann * temperature_k);
    return 1.0 / std::expm1(x);
}

PreparationFidelity preparation_fidelity(const FluxQubitParams& a, const FluxQubitParams& b, double photon_probability,
                                         double hbar) {
    PreparationFidelity f;
    f.stay_a = lz_stay_probability(a.ramp_rate, a, hbar);
    f.flip_b = 1.0 - lz_stay_probability(b.ramp_rate, b, hbar);
    f.photon_probability = photon_probability;
    f.fidelity = f.stay_a * f.flip_b * (1.0 - photon_probability);
    return f;
}

std::vector<std::string> missing_fields(const DesignInput& in) {
    std::vector<std::string> out;
    for (const auto& [name, q] : {std::pair<const char*, const QubitDesign*>{"qubit_a", &in.a}, {"qubit_b", &in.b}}) {
        const std::string pre = fmt::format("design.{}.", name);
        if (!q->persistent_current_a) out.push_back(pre + "persistent_current_a");
        if (!q->gap_hz) out.push_back(pre + "gap_hz");
        if (!q->flux_offset_wb) out.push_back(pre + "flux_offset_wb");
        if (!q->ramp_wb_per_s) out.push_back(pre + "ramp_wb_per_s");
        if (!q->coupling_hz) out.push_back(pre + "coupling_hz");
    }
    return out;
}

IncompleteDesign::IncompleteDesign(std::vector<std::string> missing)
    : std::runtime_error("incomplete design: missing " + join(missing)), missing_(std::move(missing)) {}

bool FeasibilityReport::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

FeasibilityReport feasibility_report(const DesignInput& in) {
    if (auto miss = missing_fields(in); !miss.empty()) throw IncompleteDesign(std::move(miss));
    const FluxQubitParams a = flux_params(in.a);
    const FluxQubitParams b = flux_params(in.b);
    check(a);
    check(b);

    FeasibilityReport r;
    r.omega_a = omega_from_flux(a);
    r.omega_b = omega_from_flux(b);
    r.g_over_omega_a = 2.0 * kPi * *in.a.coupling_hz / r.omega_a;
    r.g_over_omega_b = 2.0 * kPi * *in.b.coupling_hz / r.omega_b;
    r.k_a = coupling_ratio(r.g_over_omega_a, 1.0);
    r.k_b = coupling_ratio(r.g_over_omega_b, 1.0);
    r.lz_exponent_a = lz_exponent(a.ramp_rate, a);
    r.lz_exponent_b = lz_exponent(b.ramp_rate, b);
    r.lz_stay_a = std::exp(-r.lz_exponent_a);
    r.lz_stay_b = std::exp(-r.lz_exponent_b);
    r.temperature_k = in.temperature_k;
    const double fa = r.omega_a / (2.0 * kPi);
    const double fb = r.omega_b / (2.0 * kPi);
    r.thermal_a = thermal_occupancy(fa, in.temperature_k);
    r.thermal_b = thermal_occupancy(fb, in.temperature_k);

    if (in.compute_dressing) {
        ModelParams mp;
        mp.omega_a = 1.0;
        mp.omega_b = r.omega_b / r.omega_a;
        mp.k_a = r.k_a;
        mp.k_b = r.k_b;
        mp.x_a = 0.0;
        mp.x_b = in.separation;
        r.photon_probability = ground_dressing(validate(mp, in.dressing)).photon_probability;
    }
    r.preparation = preparation_fidelity(a, b, r.photon_probability);

    r.checks.push_back(upper_bound("init_coupling_a", r.g_over_omega_a, 0.15, "g/Omega_A < 0.15"));
    r.checks.push_back(upper_bound("init_coupling_b", r.g_over_omega_b, 0.15, "g/Omega_B < 0.15"));
    r.checks.push_back(lower_bound("thermal_guard_a_hz", fa, 1.5e9, "Omega_A / 2 pi >= 1.5 GHz"));
    r.checks.push_back(lower_bound("thermal_guard_b_hz", fb, 1.5e9, "Omega_B / 2 pi >= 1.5 GHz"));
    r.checks.push_back(lower_bound("diabatic_ramp_a_wb_per_s", a.ramp_rate, 10.0 * diabatic_rate_scale(a),
                                   "alpha_A >= 10 hbar Delta_A^2 / (2 I_p)"));
    r.checks.push_back(upper_bound("adiabatic_ramp_b_wb_per_s", b.ramp_rate, 0.1 * adiabatic_rate_scale(b),
                                   "alpha_B <= pi hbar Delta_B^2 / (4 I_p) / 10"));
    {
        auto c = upper_bound("perturbative_a", r.k_a, 0.25, "K_A <= 0.25");
        c.pass = r.k_a <= 0.25;
        r.checks.push_back(c);
        c = upper_bound("perturbative_b", r.k_b, 0.25, "K_B <= 0.25");
        c.pass = r.k_b <= 0.25;
        r.checks.push_back(c);
    }
    r.checks.push_back(lower_bound("sizable_product", r.k_a * r.k_b, 1e-3, "K_A K_B >= 1e-3"));
    {
        DesignCheck c{"strategy_ka_gt_kb", r.k_a > r.k_b, r.k_a, r.k_b, r.k_b > 0.0 ? r.k_a / r.k_b : HUGE_VAL,
                      "K_A > K_B"};
        r.checks.push_back(c);
    }
    return r;
}

std::string FeasibilityReport::text() const {
    std::string s;
    s += "Flux-qubit feasibility summary\n\n";
    s += fmt::format("Omega_A / 2pi        {:.6g} Hz\n", omega_a / (2.0 * kPi));
    s += fmt::format("Omega_B / 2pi        {:.6g} Hz\n", omega_b / (2.0 * kPi));
    s += fmt::format("g / Omega            A {:.6g}   B {:.6g}\n", g_over_omega_a, g_over_omega_b);
    s += fmt::format("K                    A {:.6g}   B {:.6g}\n", k_a, k_b);
    s += fmt::format("LZ exponent          A {:.6g}   B {:.6g}\n", lz_exponent_a, lz_exponent_b);
    s += fmt::format("LZ stay probability  A {:.6g}   B {:.6g}\n", lz_stay_a, lz_stay_b);
    s += fmt::format("temperature          {:.6g} K (input, not taken from the experiment)\n", temperature_k);
    s += fmt::format("thermal occupancy    A {:.6g}   B {:.6g}\n", thermal_a, thermal_b);
    s += fmt::format("ground-state photons {:.6g}\n\n", photon_probability);
    s += "Preparation of |e_A g_B 0> (factorized estimate; correlated ramp errors not modelled)\n";
    s += fmt::format("  A diabatic passage {:.6g}\n", preparation.stay_a);
    s += fmt::format("  B adiabatic follow {:.6g}\n", preparation.flip_b);
    s += fmt::format("  photon-free        {:.6g}\n", 1.0 - preparation.photon_probability);
    s += fmt::format("  fidelity           {:.6g}\n\n", preparation.fidelity);
    s += "Checks\n";
    for (const auto& c : checks) {
        s += fmt::format("  {:<26} {}  value {:.6g}  threshold {:.6g}  margin {:.4g}  ({})\n", c.name,
                         c.pass ? "PASS" : "FAIL", c.value, c.threshold, c.margin, c.rule);
    }
    s += "\nReadout reference: SQUID activation pulse about 15 ns; ramps need sub-ns timing resolution.\n";
    return s;
}

std::string FeasibilityReport::key_values() const {
    std::string s;
    auto kv = [&s](const std::string& k, double v) { s += k + "=" + format_number(v) + "\n"; };
    kv("omega_a_rad_per_s", omega_a);
    kv("omega_b_rad_per_s", omega_b);
    kv("freq_a_hz", omega_a / (2.0 * kPi));
    kv("freq_b_hz", omega_b / (2.0 * kPi));
    kv("g_over_omega_a", g_over_omega_a);
    kv("g_over_omega_b", g_over_omega_b);
    kv("k_a", k_a);
    kv("k_b", k_b);
    kv("lz_exponent_a", lz_exponent_a);
    kv("lz_exponent_b", lz_exponent_b);
    kv("lz_stay_a", lz_stay_a);
    kv("lz_stay_b", lz_stay_b);
    kv("temperature_k", temperature_k);
    kv("thermal_occupancy_a", thermal_a);
    kv("thermal_occupancy_b", thermal_b);
    kv("photon_probability", photon_probability);
    kv("fidelity", preparation.fidelity);
    for (const auto& c : checks) {
        s += "check." + c.name + ".pass=" + (c.pass ? "true" : "false") + "\n";
        kv("check." + c.name + ".value", c.value);
        kv("check." + c.name + ".threshold", c.threshold);
        kv("check." + c.name + ".margin", c.margin);
    }
    s += std::string("all_pass=") + (all_pass() ? "true" : "false") + "\n";
    return s;
}

}  // namespace fermi
