#include "fermi/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace fermi {

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& issue : issues) {
        out += fmt::format("\n  {}: {}", issue.field, issue.message);
    }
    return out;
}

// Mode-grid comparisons tolerate a few ulps so that a derived box length
// reproduces exactly the grid it was derived from.
constexpr double kGridSlack = 1e-12;

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ValidationError::ValidationError(std::string field, std::string message)
    : ValidationError(std::vector<Issue>{{std::move(field), std::move(message)}}) {}

double ModelParams::separation() const { return std::abs(x_b - x_a); }

std::string to_string(CutoffKind kind) {
    return kind == CutoffKind::Sharp ? "sharp" : "exponential";
}

CutoffKind cutoff_from_string(const std::string& name) {
    if (name == "sharp") return CutoffKind::Sharp;
    if (name == "exponential") return CutoffKind::Exponential;
    throw ValidationError("field.cutoff", fmt::format("unknown cutoff kind '{}'", name));
}

NaturalUnits to_natural_units(const SiParams& si) {
    std::vector<Issue> issues;
    auto positive = [&](double value, const char* field) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            issues.push_back({field, fmt::format("must be positive, got {}", value)});
        }
    };
    positive(si.freq_a_hz, "freq_a_hz");
    positive(si.freq_b_hz, "freq_b_hz");
    positive(si.separation_m, "separation_m");
    positive(si.speed_m_per_s, "speed_m_per_s");
    if (si.k_a < 0.0) issues.push_back({"k_a", "must be non-negative"});
    if (si.k_b < 0.0) issues.push_back({"k_b", "must be non-negative"});
    if (!issues.empty()) throw ValidationError(std::move(issues));

    UnitScale scale;
    scale.omega_ref = 2.0 * std::numbers::pi * si.freq_a_hz;
    scale.time_unit_s = 1.0 / scale.omega_ref;
    scale.length_unit_m = si.speed_m_per_s / scale.omega_ref;

    ModelParams p;
    p.omega_a = 1.0;
    p.omega_b = si.freq_b_hz / si.freq_a_hz;
    p.k_a = si.k_a;
    p.k_b = si.k_b;
    p.x_a = si.x_a_m / scale.length_unit_m;
    p.x_b = p.x_a + si.separation_m / scale.length_unit_m;
    return {p, scale};
}

double dipole_from_k(double k, const ModelParams& params) {
    if (k < 0.0 || !std::isfinite(k)) {
        throw ValidationError("K", fmt::format("coupling ratio must be non-negative, got {}", k));
    }
    return std::sqrt(k * params.v / (4.0 * params.norm_n));
}

double k_from_dipole(double d, const ModelParams& params) {
    return 4.0 * d * d * params.norm_n / params.v;
}

double cutoff_weight(const Discretization& disc, double omega) {
    if (disc.cutoff == CutoffKind::Exponential) return std::exp(-omega / disc.omega_c);
    return 1.0;
}

RunConfig validate(const ModelParams& params, const Discretization& disc) {
    std::vector<Issue> issues;
    const auto& p = params;

    if (!(p.omega_a > 0.0)) issues.push_back({"qubits.omega_a", fmt::format("must be positive, got {}", p.omega_a)});
    if (!(p.omega_b > 0.0)) issues.push_back({"qubits.omega_b", fmt::format("must be positive, got {}", p.omega_b)});
    if (!(p.k_a >= 0.0)) issues.push_back({"qubits.k_a", fmt::format("must be non-negative, got {}", p.k_a)});
    if (!(p.k_b >= 0.0)) issues.push_back({"qubits.k_b", fmt::format("must be non-negative, got {}", p.k_b)});
    if (!(p.separation() > 0.0)) issues.push_back({"qubits.separation", "qubit separation must be positive"});
    if (p.v != 1.0) issues.push_back({"v", "propagation speed is fixed to 1 in natural units"});
    if (p.norm_n != 1.0) issues.push_back({"N", "field normalization is fixed to 1"});

    if (disc.modes < 2 || disc.modes % 2 != 0) {
        issues.push_back({"field.modes", fmt::format("must be even and >= 2, got {}", disc.modes)});
    }
    const double omega_top = std::max(p.omega_a, p.omega_b);
    if (!(disc.omega_max >= 10.0 * omega_top)) {
        issues.push_back({"field.omega_max",
                          fmt::format("must be >= 10 * max qubit frequency = {}, got {}", 10.0 * omega_top,
                                      disc.omega_max)});
    }
    if (!(disc.t_max > 0.0)) issues.push_back({"run.t_max", fmt::format("must be positive, got {}", disc.t_max)});
    if (disc.cutoff == CutoffKind::Exponential && !(disc.omega_c > 0.0)) {
        issues.push_back({"field.omega_c", "exponential cutoff needs a positive omega_c"});
    }
    if (p.k_a > 0.0 && p.k_b > 0.0 && disc.n_max < 2) {
        issues.push_back({"field.n_max", fmt::format("two coupled qubits need n_max >= 2, got {}", disc.n_max)});
    }

    RunConfig cfg;
    cfg.params = p;
    cfg.disc = disc;

    const std::size_t half = disc.modes / 2;
    double box = disc.box_length;
    if (box == 0.0 && half > 0 && disc.omega_max > 0.0) {
        box = 2.0 * std::numbers::pi * p.v * static_cast<double>(half) / disc.omega_max;
    }
    if (!(box > 0.0)) {
        issues.push_back({"field.box_length", fmt::format("must be positive, got {}", box)});
    } else {
        const double min_box = 2.0 * (p.separation() + p.v * disc.t_max);
        if (box < min_box) {
            issues.push_back({"field.box_length",
                              fmt::format("L = {} violates the horizon rule L >= 2 (r + v t_max); minimum admissible L = {}",
                                          box, min_box)});
        }
        const double dk = 2.0 * std::numbers::pi / box;
        if (half > 0 && p.v * dk * static_cast<double>(half) < disc.omega_max * (1.0 - kGridSlack)) {
            issues.push_back({"field.modes",
                              fmt::format("M/2 = {} modes of spacing {} reach only omega = {} < omega_max = {}", half,
                                          p.v * dk, p.v * dk * static_cast<double>(half), disc.omega_max)});
        }
        cfg.dk = dk;
        cfg.disc.box_length = box;
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));

    cfg.d_a = dipole_from_k(p.k_a, p);
    cfg.d_b = dipole_from_k(p.k_b, p);
    for (std::size_t n = 1; n <= half; ++n) {
        const double k = cfg.dk * static_cast<double>(n);
        const double omega = p.v * k;
        if (omega > disc.omega_max * (1.0 + kGridSlack)) break;
        const double weight = std::sqrt(p.norm_n * omega * cfg.dk * cutoff_weight(disc, omega));
        cfg.modes.push_back({k, omega, weight});
        cfg.modes.push_back({-k, omega, weight});
    }
    return cfg;
}

RunConfig with_couplings(const RunConfig& cfg, double k_a, double k_b) {
    ModelParams p = cfg.params;
    p.k_a = k_a;
    p.k_b = k_b;
    return validate(p, cfg.disc);
}

}  // namespace fermi
