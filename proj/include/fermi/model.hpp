#pragma once

// Physical parameters, unit conventions and field discretization for two
// qubits coupled to a one-dimensional transmission line.
//
// Internally hbar = v = N = 1. Lengths are measured in v / omega_ref and
// times in 1 / omega_ref, where omega_ref is qubit A's angular frequency.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermi {

/// One violated invariant: which field, and what went wrong.
struct Issue {
    std::string field;
    std::string message;
};

/// Thrown whenever a parameter record or configuration fails validation.
/// Carries every violation found, not just the first one.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Issue> issues);
    ValidationError(std::string field, std::string message);
    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    std::vector<Issue> issues_;
};

/// Raised when a requested computation would exceed a configured resource cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Qubit { A, B };

struct ModelParams {
    double omega_a = 1.0;
    double omega_b = 1.0;
    double k_a = 0.0;  // dimensionless coupling ratio K_A
    double k_b = 0.0;
    double x_a = 0.0;
    double x_b = 1.0;
    double v = 1.0;        // propagation speed, fixed by the unit convention
    double norm_n = 1.0;   // field normalization constant, fixed to 1

    double separation() const;
    double omega(Qubit q) const { return q == Qubit::A ? omega_a : omega_b; }
    double k(Qubit q) const { return q == Qubit::A ? k_a : k_b; }
    double x(Qubit q) const { return q == Qubit::A ? x_a : x_b; }

    bool operator==(const ModelParams&) const = default;
};

enum class CutoffKind { Sharp, Exponential };

std::string to_string(CutoffKind kind);
CutoffKind cutoff_from_string(const std::string& name);

struct Discretization {
    std::size_t modes = 512;        // nominal mode count M (even)
    double omega_max = 30.0;        // angular-frequency cutoff of the mode grid
    double box_length = 0.0;        // L; 0 means derive from M and omega_max
    std::size_t n_max = 2;          // total photon-number truncation
    double t_max = 1.0;
    CutoffKind cutoff = CutoffKind::Sharp;
    double omega_c = 0.0;           // exponential soft-cutoff scale

    bool operator==(const Discretization&) const = default;
};

/// A single travelling-wave mode of the periodic box.
struct Mode {
    double k = 0.0;
    double omega = 0.0;
    /// sqrt(N * omega * dk * cutoff_weight(omega)); multiply by d_J for qubit J.
    double weight = 0.0;

    bool operator==(const Mode&) const = default;
};

/// Validated configuration with all derived quantities populated.
struct RunConfig {
    ModelParams params;
    Discretization disc;   // box_length always resolved
    double dk = 0.0;
    double d_a = 0.0;
    double d_b = 0.0;
    std::vector<Mode> modes;  // ordered (+k1, -k1, +k2, -k2, ...)

    std::size_t mode_count() const { return modes.size(); }
    double dipole(Qubit q) const { return q == Qubit::A ? d_a : d_b; }
    /// Real part of the per-mode coupling d_J * weight; the position phase is separate.
    double coupling(Qubit q, std::size_t mode) const { return dipole(q) * modes[mode].weight; }

    bool operator==(const RunConfig&) const = default;
};

/// Input record in SI units. Frequencies are cyclic (Hz).
struct SiParams {
    double freq_a_hz = 0.0;
    double freq_b_hz = 0.0;
    double k_a = 0.0;
    double k_b = 0.0;
    double x_a_m = 0.0;
    double separation_m = 0.0;
    double speed_m_per_s = 0.0;
};

/// Conversion factors between SI and natural units.
struct UnitScale {
    double omega_ref = 1.0;     // rad/s
    double time_unit_s = 1.0;   // seconds per natural time unit
    double length_unit_m = 1.0; // metres per natural length unit

    double to_seconds(double t_natural) const { return t_natural * time_unit_s; }
    double to_natural_time(double t_seconds) const { return t_seconds / time_unit_s; }
    double to_metres(double x_natural) const { return x_natural * length_unit_m; }
};

struct NaturalUnits {
    ModelParams params;
    UnitScale scale;
};

NaturalUnits to_natural_units(const SiParams& si);

/// d = hbar * sqrt(K v / (4 N)).
double dipole_from_k(double k, const ModelParams& params);
/// K = 4 d^2 N / (hbar^2 v).
double k_from_dipole(double d, const ModelParams& params);

/// Cutoff weight applied to the spectral density N * omega * dk.
double cutoff_weight(const Discretization& disc, double omega);

/// Checks every invariant and populates derived quantities.
/// Throws ValidationError listing all violations.
RunConfig validate(const ModelParams& params, const Discretization& disc);

/// Same configuration with one coupling ratio replaced, re-validated.
RunConfig with_couplings(const RunConfig& cfg, double k_a, double k_b);

}  // namespace fermi
