#pragma once

// Flux-qubit realization of the two-qubit line: dispersion, coupling ratios,
// Landau-Zener preparation, thermal photons and a feasibility summary.
// SI units unless a function says otherwise.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermi/model.hpp"

namespace fermi {

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K

struct FluxQubitParams {
    double persistent_current = 0.0;   // I_p, A
    double gap = 0.0;                  // Delta, rad/s
    double flux_offset = 0.0;          // delta Phi_x from degeneracy, Wb
    double ramp_rate = 0.0;            // alpha, Wb/s
};

/// Throws ValidationError unless I_p > 0 and Delta > 0.
void check(const FluxQubitParams& p);

/// Omega = sqrt((2 I_p dPhi / hbar)^2 + Delta^2). Pass hbar = 1 for
/// energy-unit bookkeeping.
double omega_from_flux(const FluxQubitParams& p, double hbar = kHbar);
/// Non-negative flux offset giving Omega; std::domain_error when Omega < Delta.
double flux_from_omega(double omega, const FluxQubitParams& p, double hbar = kHbar);

/// K = 2 (g / Omega)^2.
double coupling_ratio(double g, double omega);
double g_from_K(double k, double omega);

/// pi hbar Delta^2 / (4 I_p alpha).
double lz_exponent(double alpha, const FluxQubitParams& p, double hbar = kHbar);
/// Probability of diabatic passage, exp(-lz_exponent).
double lz_stay_probability(double alpha, const FluxQubitParams& p, double hbar = kHbar);
/// Ramp rate at which lz_exponent equals 1 (the adiabatic scale pi hbar Delta^2 / 4 I_p).
double adiabatic_rate_scale(const FluxQubitParams& p, double hbar = kHbar);
/// hbar Delta^2 / (2 I_p).
double diabatic_rate_scale(const FluxQubitParams& p, double hbar = kHbar);

struct SweepOptions {
    double window = 40.0;   // half-width in units of the crossing time
    double tol = 1e-10;
};

struct SweepResult {
    double p_stay = 0.0;
    double half_window = 0.0;   // in units of 1 / Delta
    std::size_t steps = 0;
};

/// Integrates i d/dt psi = 1/2 (beta t sigma_z + sigma_x) psi with Delta = 1 and
/// beta = pi / (2 exponent) from -T to T, starting and ending in the
/// adiabatic eigenstates, and returns the diabatic-passage probability.
SweepResult lz_sweep_numeric(double exponent, const SweepOptions& opts = {});

/// Bose-Einstein occupancy 1 / (exp(h f / k T) - 1); zero at T = 0.
double thermal_occupancy(double freq_hz, double temperature_k);

struct PreparationFidelity {
    double stay_a = 0.0;              // diabatic passage of A (excites A)
    double flip_b = 0.0;              // 1 - stay of B (B left in ground)
    double photon_probability = 0.0;
    double fidelity = 0.0;
};

PreparationFidelity preparation_fidelity(const FluxQubitParams& a, const FluxQubitParams& b, double photon_probability,
                                         double hbar = kHbar);

/// Experimental inputs as read from a configuration; unset fields are missing.
struct QubitDesign {
    std::optional<double> persistent_current_a;
    std::optional<double> gap_hz;
    std::optional<double> flux_offset_wb;
    std::optional<double> ramp_wb_per_s;
    std::optional<double> coupling_hz;
};

struct DesignInput {
    QubitDesign a;
    QubitDesign b;
    double temperature_k = 0.02;
    /// Discretization used for the ground-state dressing (natural units).
    double separation = 3.141592653589793;
    Discretization dressing{128, 10.0, 0.0, 2, 1.0, CutoffKind::Sharp, 0.0};
    bool compute_dressing = true;
};

/// Lists every missing field of the input, e.g. "design.qubit_a.gap_hz".
std::vector<std::string> missing_fields(const DesignInput& in);

class IncompleteDesign : public std::runtime_error {
public:
    explicit IncompleteDesign(std::vector<std::string> missing);
    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

struct DesignCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    double margin = 0.0;   // > 1 passes with room; < 1 fails by that factor
    std::string rule;
};

struct FeasibilityReport {
    double omega_a = 0.0;   // rad/s
    double omega_b = 0.0;
    double g_over_omega_a = 0.0;
    double g_over_omega_b = 0.0;
    double k_a = 0.0;
    double k_b = 0.0;
    double lz_exponent_a = 0.0;
    double lz_exponent_b = 0.0;
    double lz_stay_a = 0.0;
    double lz_stay_b = 0.0;
    double temperature_k = 0.0;
    double thermal_a = 0.0;
    double thermal_b = 0.0;
    double photon_probability = 0.0;
    PreparationFidelity preparation;
    std::vector<DesignCheck> checks;

    bool all_pass() const;
    /// Human-readable summary.
    std::string text() const;
    /// key=value lines, SI unit suffixes in the keys.
    std::string key_values() const;
};

/// Throws IncompleteDesign listing every missing field.
FeasibilityReport feasibility_report(const DesignInput& in);

}  // namespace fermi
