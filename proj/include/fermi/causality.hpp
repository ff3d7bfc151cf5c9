#pragma once

// Differential light-cone experiment: qubit B's excitation with and without
// qubit A's coupling, front detection, rise time and refinement ladders.

#include <stdexcept>
#include <string>
#include <vector>

#include "fermi/dynamics.hpp"
#include "fermi/perturbation.hpp"

namespace fermi {

/// The time grid cannot resolve the signal front.
class FrontUnresolved : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitialA { Ground, Excited, Superposition };

InitialA initial_a_from_string(const std::string& name);
std::string to_string(InitialA a);

struct CausalOptions {
    InitialA initial_a = InitialA::Excited;
    EvolveOptions evolve;
    HamiltonianOptions hamiltonian;
    double front_factor = 5.0;   // t* is the first |dP| above front_factor * residual
    double guard = 0.95;         // pre-front window is v t <= guard * r
    double points_per_period = 20.0;
};

/// Front statistics of a difference series.
struct FrontAnalysis {
    double residual = 0.0;     // max |dP| for v t <= guard * r
    double peak = 0.0;         // max |dP| for r <= v t <= 2 r
    bool detected = false;
    std::size_t front_index = 0;
    double front_time = 0.0;
    bool rise_measured = false;
    double t10 = 0.0;
    double t90 = 0.0;
    double rise_time = 0.0;
    double rise_peak_time = 0.0;
};

/// Pure analysis on a sampled |dP|; r is the light-travel time.
FrontAnalysis analyze_front(const std::vector<double>& times, const std::vector<double>& delta_p, double r,
                            double front_factor = 5.0, double guard = 0.95);

struct CausalReport {
    double separation = 0.0;
    std::vector<double> times;
    std::vector<double> p_eb_full;
    std::vector<double> p_eb_ref;   // d_A = 0
    std::vector<double> delta_p;
    FrontAnalysis front;
    double max_norm_drift = 0.0;
    std::vector<std::string> notes;
};

/// Smallest step count that puts points_per_period points in each 1 / Omega.
std::size_t min_resolving_steps(const RunConfig& cfg, double t_max, double points_per_period = 20.0);

/// Two evolutions, identical except d_A = 0 in the reference, run concurrently.
/// Throws FrontUnresolved when the grid is too coarse or ends before r / v.
CausalReport run_differential(const RunConfig& cfg, const TimeGrid& grid, const CausalOptions& opts = {});

struct ConvergenceRow {
    Discretization disc;
    std::size_t mode_count = 0;
    std::size_t dimension = 0;
    double residual = 0.0;
    double peak = 0.0;
    double relative = 0.0;   // residual / peak
    double ratio = 1.0;      // residual / residual of the first rung
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool monotone = true;
    /// Aitken limit for three or more rungs, geometric one-rung projection for two.
    double extrapolated = 0.0;
    std::vector<std::string> warnings;
};

/// Runs run_differential for every rung (ordered coarse to fine). The model
/// parameters of `base` are kept; each rung replaces the discretization.
ConvergenceTable convergence_scan(const RunConfig& base, const TimeGrid& grid, const std::vector<Discretization>& ladder,
                                  const CausalOptions& opts = {});

struct Overlay {
    std::vector<double> times;
    std::vector<double> delta_p;
    std::vector<double> p_r_eb;
    std::vector<double> m1_sq;
    std::vector<double> baseline;   // ED P_eB with d_A = 0
    double distance = 0.0;          // relative L2 over v t <= 2 r
    double baseline_distance = 0.0; // same, |M1|^2 against the baseline
};

/// Relative L2 distance ||a - b|| / ||a|| over indices with times[i] <= t_end; 0 when both vanish.
double relative_l2(const std::vector<double>& times, const std::vector<double>& a, const std::vector<double>& b,
                   double t_end);

Overlay compare_perturbative(const RunConfig& cfg, const TimeGrid& grid, const CausalOptions& opts = {},
                             const PerturbationOptions& popts = {});

/// ED analogue of the r-dependent joint probability for A initially excited:
/// P_eB_gA(full) - P_gA(d_B = 0) * P_eB(d_A = 0).
std::vector<double> ed_joint_r_dependent(const RunConfig& cfg, const TimeGrid& grid, const CausalOptions& opts = {});

}  // namespace fermi
