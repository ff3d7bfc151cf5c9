#include "fermi/dynamics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace fermi {

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(points());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
    return t;
}

void check_grid(const TimeGrid& grid, const Discretization& disc) {
    std::vector<Issue> issues;
    if (grid.steps == 0) issues.push_back({"run.steps", "need at least one step"});
    if (!(grid.t_max > 0.0)) issues.push_back({"run.t_max", fmt::format("must be positive, got {}", grid.t_max)});
    if (grid.t_max > disc.t_max * (1.0 + 1e-12)) {
        issues.push_back({"run.t_max", fmt::format("grid end {} exceeds the discretization horizon t_max = {}",
                                                   grid.t_max, disc.t_max)});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

InitialKind initial_kind_from_string(const std::string& name) {
    if (name == "eA_gB_vacuum") return InitialKind::ExcitedAGroundB;
    if (name == "gA_gB_vacuum") return InitialKind::GroundAGroundB;
    throw ValidationError("run.initial_state", fmt::format("unknown initial state '{}'", name));
}

StateVector initial_state(const FockBasis& basis, InitialKind kind) {
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    const bool ea = kind == InitialKind::ExcitedAGroundB;
    psi[static_cast<Eigen::Index>(basis.index(FockBasis::sector(ea, false), 0))] = 1.0;
    return psi;
}

StateVector initial_state(const FockBasis& basis, const std::vector<std::pair<BasisState, cplx>>& amplitudes) {
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    for (const auto& [state, amp] : amplitudes) psi[static_cast<Eigen::Index>(basis.rank(state))] += amp;
    const double n2 = psi.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-12) {
        throw ValidationError("run.initial_state", fmt::format("custom amplitudes have squared norm {}", n2));
    }
    return psi;
}

StateVector qubit_a_superposition(const FockBasis& basis, cplx amp_g, cplx amp_e) {
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    psi[static_cast<Eigen::Index>(basis.index(FockBasis::sector(false, false), 0))] = amp_g;
    psi[static_cast<Eigen::Index>(basis.index(FockBasis::sector(true, false), 0))] = amp_e;
    return psi;
}

Trajectory evolve(const LinearMap& h, const StateVector& psi0, const TimeGrid& grid, const EvolveOptions& opts) {
    if (grid.steps == 0) throw ValidationError("run.steps", "need at least one step");
    const double n0 = psi0.squaredNorm();
    if (std::abs(n0 - 1.0) > 1e-12) {
        throw ValidationError("psi0", fmt::format("initial state has squared norm {}", n0));
    }
    Trajectory traj;
    traj.grid = grid;
    StateVector psi = psi0;
    LanczosPropagator prop(h, static_cast<std::size_t>(psi0.size()), opts.krylov);
    const double tol_step = opts.tol / static_cast<double>(grid.steps);

    auto emit = [&](std::size_t i) {
        const double drift = std::abs(1.0 - psi.squaredNorm());
        traj.norm_drift.push_back(drift);
        if (drift > opts.norm_tolerance) {
            throw ConvergenceError(fmt::format("norm drift {} at t = {} exceeds {}", drift, grid.time(i),
                                               opts.norm_tolerance),
                                   drift);
        }
        if (opts.store_snapshots) traj.snapshots.push_back(psi);
        if (opts.observer) opts.observer(i, grid.time(i), psi);
    };

    emit(0);
    for (std::size_t i = 1; i <= grid.steps; ++i) {
        const auto stats = prop.advance(psi, grid.time(i) - grid.time(i - 1), tol_step);
        traj.matvecs += stats.matvecs;
        traj.error_estimate += stats.error_estimate;
        emit(i);
    }
    return traj;
}

Trajectory evolve(const SparseOperator& h, const StateVector& psi0, const TimeGrid& grid, const EvolveOptions& opts) {
    if (static_cast<std::size_t>(psi0.size()) != h.dimension()) {
        throw std::invalid_argument("initial state does not match the operator dimension");
    }
    return evolve(as_map(h), psi0, grid, opts);
}

ObservableRecorder::ObservableRecorder(const FockBasis& basis)
    : w_ea_(projector_weights(basis, Selector::ExcitedA)),
      w_eb_(projector_weights(basis, Selector::ExcitedB)),
      w_joint_(projector_weights(basis, Selector::JointExcitedBGroundA)),
      w_n_(projector_weights(basis, Selector::PhotonNumber)) {}

void ObservableRecorder::record(double t, const StateVector& psi) {
    series_.times.push_back(t);
    series_.p_ea.push_back(diagonal_expectation(w_ea_, psi));
    series_.p_eb.push_back(diagonal_expectation(w_eb_, psi));
    series_.p_eb_ga.push_back(diagonal_expectation(w_joint_, psi));
    series_.photons.push_back(diagonal_expectation(w_n_, psi));
    series_.norm_drift.push_back(std::abs(1.0 - psi.squaredNorm()));
}

ObservableSeries observables(const Trajectory& traj, const FockBasis& basis) {
    if (traj.snapshots.size() != traj.grid.points()) {
        throw std::invalid_argument("trajectory has no stored snapshots");
    }
    ObservableRecorder rec(basis);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) rec.record(traj.grid.time(i), traj.snapshots[i]);
    return rec.take();
}

Eigen::MatrixXcd one_body_density(const StateVector& psi, const FockBasis& basis) {
    const LadderTable ladder(basis);
    const auto m = static_cast<Eigen::Index>(basis.modes());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(m, m);
    Eigen::VectorXcd phi(m);
    const std::size_t nc = basis.config_count();
    for (std::size_t s = 0; s < 4; ++s) {
        const cplx* x = psi.data() + s * nc;
        for (std::size_t r = 0; r < ladder.lower_configs(); ++r) {
            // phi_n = <s, r| b_n |psi>
            bool any = false;
            for (Eigen::Index n = 0; n < m; ++n) {
                const auto nn = static_cast<std::size_t>(n);
                phi[n] = ladder.factor(r, nn) * x[ladder.target(r, nn)];
                any = any || phi[n] != cplx(0.0);
            }
            if (any) rho.noalias() += phi.conjugate() * phi.transpose();
        }
    }
    return rho;
}

std::vector<double> box_cells(const RunConfig& cfg, std::size_t cells, double x0) {
    if (cells == 0) throw ValidationError("run.density_cells", "need at least one cell");
    std::vector<double> edges(cells + 1);
    const double l = cfg.disc.box_length;
    for (std::size_t i = 0; i <= cells; ++i) edges[i] = x0 + l * static_cast<double>(i) / static_cast<double>(cells);
    return edges;
}

namespace {

// (1/L) int_a^b exp(i q x) dx
cplx cell_overlap(double q, double a, double b, double l) {
    if (q == 0.0) return (b - a) / l;
    return (std::exp(cplx(0.0, q * b)) - std::exp(cplx(0.0, q * a))) / (cplx(0.0, q) * l);
}

}  // namespace

std::vector<double> photon_density(const StateVector& psi, const FockBasis& basis, const RunConfig& cfg,
                                   const std::vector<double>& edges) {
    const Eigen::MatrixXcd rho = one_body_density(psi, basis);
    const auto m = rho.rows();
    const double l = cfg.disc.box_length;
    std::vector<double> out(edges.size() - 1, 0.0);
    for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
        cplx acc = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                if (rho(i, j) == cplx(0.0)) continue;
                const double q = cfg.modes[static_cast<std::size_t>(j)].k - cfg.modes[static_cast<std::size_t>(i)].k;
                acc += rho(i, j) * cell_overlap(q, edges[c], edges[c + 1], l);
            }
        }
        out[c] = acc.real();
    }
    return out;
}

std::vector<std::vector<double>> photon_density(const Trajectory& traj, const FockBasis& basis, const RunConfig& cfg,
                                                const std::vector<double>& edges) {
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.snapshots.size());
    for (const auto& psi : traj.snapshots) rows.push_back(photon_density(psi, basis, cfg, edges));
    return rows;
}

ObservableSeries simulate(const RunConfig& cfg, const TimeGrid& grid, const SimulationOptions& opts) {
    check_grid(grid, cfg.disc);
    const FockBasis basis(cfg.mode_count(), cfg.disc.n_max);
    const SparseOperator h = build_hamiltonian(cfg, basis, opts.hamiltonian);
    const StateVector psi0 = opts.custom_initial ? initial_state(basis, *opts.custom_initial) : initial_state(basis, opts.initial);

    ObservableRecorder rec(basis);
    std::vector<double> edges;
    std::vector<std::vector<double>> density;
    if (opts.density_cells > 0) edges = box_cells(cfg, opts.density_cells, cfg.params.x_a - 0.5 * cfg.disc.box_length);

    EvolveOptions eo = opts.evolve;
    eo.store_snapshots = false;
    eo.observer = [&](std::size_t i, double t, const StateVector& psi) {
        rec.record(t, psi);
        if (!edges.empty()) density.push_back(photon_density(psi, basis, cfg, edges));
        if (opts.evolve.observer) opts.evolve.observer(i, t, psi);
    };
    evolve(h, psi0, grid, eo);
    ObservableSeries out = rec.take();
    out.cell_edges = std::move(edges);
    out.density = std::move(density);
    return out;
}

Dressing ground_dressing(const RunConfig& cfg, double tol, std::size_t max_restarts) {
    const FockBasis basis(cfg.mode_count(), cfg.disc.n_max);
    const std::size_t vacuum = basis.index(FockBasis::sector(false, false), 0);
    Dressing out;
    if (cfg.d_a == 0.0 && cfg.d_b == 0.0) {
        out.energy = -0.5 * (cfg.params.omega_a + cfg.params.omega_b);
        out.iterations = 0;
        return out;
    }
    const HamiltonianAction h(cfg, basis);
    const LinearMap map = [&h](const StateVector& x, StateVector& y) { h.apply(x, y); };
    StateVector start = StateVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    // |g g 0> lies in the even (qubit + photon) excitation-parity sector, which H preserves
    start[static_cast<Eigen::Index>(vacuum)] = 1.0;
    const Eigenpair gs = lowest_eigenpair(map, start, tol, 80, max_restarts);
    out.energy = gs.value;
    out.residual = gs.residual;
    out.iterations = gs.iterations;
    out.photon_probability = 1.0 - std::norm(gs.vector[static_cast<Eigen::Index>(vacuum)]);
    out.mean_photons = diagonal_expectation(projector_weights(basis, Selector::PhotonNumber), gs.vector);
    return out;
}

}  // namespace fermi
