#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fermi/basis.hpp"
#include "fermi/hamiltonian.hpp"
#include "fermi/krylov.hpp"
#include "fermi/model.hpp"

namespace fermi {

struct TimeGrid {
    double t_max = 1.0;
    std::size_t steps = 1;

    double dt() const { return t_max / static_cast<double>(steps); }
    double time(std::size_t i) const { return t_max * static_cast<double>(i) / static_cast<double>(steps); }
    std::size_t points() const { return steps + 1; }
    std::vector<double> times() const;
};

/// Throws ValidationError if steps == 0, t_max <= 0 or t_max exceeds the
/// discretization horizon.
void check_grid(const TimeGrid& grid, const Discretization& disc);

enum class InitialKind { ExcitedAGroundB, GroundAGroundB };

InitialKind initial_kind_from_string(const std::string& name);

/// Bare product state |s_A g_B 0>.
StateVector initial_state(const FockBasis& basis, InitialKind kind);
/// Sum of amplitudes on basis states; must have unit norm to 1e-12.
StateVector initial_state(const FockBasis& basis, const std::vector<std::pair<BasisState, cplx>>& amplitudes);
/// (a_g |g_A> + a_e |e_A>) |g_B 0>, normalized by the caller.
StateVector qubit_a_superposition(const FockBasis& basis, cplx amp_g, cplx amp_e);

using Observer = std::function<void(std::size_t index, double t, const StateVector& psi)>;

struct EvolveOptions {
    double tol = 1e-10;
    double norm_tolerance = 1e-9;
    bool store_snapshots = true;
    Observer observer;
    KrylovOptions krylov;
};

struct Trajectory {
    TimeGrid grid;
    std::vector<StateVector> snapshots;  // empty when storage is disabled
    std::vector<double> norm_drift;      // |1 - <psi|psi>| per grid point
    std::size_t matvecs = 0;
    double error_estimate = 0.0;
};

/// Propagates on the uniform grid. Throws ConvergenceError when the Krylov
/// tolerance or the norm tolerance is violated.
Trajectory evolve(const LinearMap& h, const StateVector& psi0, const TimeGrid& grid, const EvolveOptions& opts = {});
Trajectory evolve(const SparseOperator& h, const StateVector& psi0, const TimeGrid& grid,
                  const EvolveOptions& opts = {});

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> p_ea;
    std::vector<double> p_eb;
    std::vector<double> p_eb_ga;
    std::vector<double> photons;
    std::vector<double> norm_drift;

    /// Optional density heatmap: one row per time, one value per cell.
    std::vector<double> cell_edges;
    std::vector<std::vector<double>> density;
};

/// Accumulates observables one snapshot at a time.
class ObservableRecorder {
public:
    explicit ObservableRecorder(const FockBasis& basis);
    void record(double t, const StateVector& psi);
    const ObservableSeries& series() const { return series_; }
    ObservableSeries take() { return std::move(series_); }

private:
    std::vector<double> w_ea_, w_eb_, w_joint_, w_n_;
    ObservableSeries series_;
};

ObservableSeries observables(const Trajectory& traj, const FockBasis& basis);

/// One-body density matrix rho_mn = <b_m^dag b_n>.
Eigen::MatrixXcd one_body_density(const StateVector& psi, const FockBasis& basis);

/// Cell edges partitioning [x0, x0 + L) into `cells` equal cells.
std::vector<double> box_cells(const RunConfig& cfg, std::size_t cells, double x0 = 0.0);

/// Photon number in each cell for one state, using box-normalized plane
/// waves exp(i k x) / sqrt(L). Cells must tile one period of the box for the
/// totals to match the photon number.
std::vector<double> photon_density(const StateVector& psi, const FockBasis& basis, const RunConfig& cfg,
                                   const std::vector<double>& edges);
std::vector<std::vector<double>> photon_density(const Trajectory& traj, const FockBasis& basis, const RunConfig& cfg,
                                                const std::vector<double>& edges);

struct SimulationOptions {
    EvolveOptions evolve;
    InitialKind initial = InitialKind::ExcitedAGroundB;
    /// Overrides `initial` when set.
    std::optional<std::vector<std::pair<BasisState, cplx>>> custom_initial;
    std::size_t density_cells = 0;   // 0 disables the heatmap
    HamiltonianOptions hamiltonian;
};

/// Builds basis and Hamiltonian for cfg and streams observables.
ObservableSeries simulate(const RunConfig& cfg, const TimeGrid& grid, const SimulationOptions& opts = {});

struct Dressing {
    double photon_probability = 0.0;   // 1 - |<g g 0|G>|^2
    double mean_photons = 0.0;
    double energy = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
};

Dressing ground_dressing(const RunConfig& cfg, double tol = 1e-10, std::size_t max_restarts = 400);

}  // namespace fermi
