#pragma once

// Short-iterative Lanczos propagation and lowest-eigenpair search for
// Hermitian operators given only through their action.

#include <functional>
#include <stdexcept>

#include "fermi/sparse_operator.hpp"

namespace fermi {

using LinearMap = std::function<void(const StateVector&, StateVector&)>;

LinearMap as_map(const SparseOperator& op);

/// Raised when the requested accuracy cannot be reached within the work limit.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved) : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

struct KrylovOptions {
    std::size_t max_dim = 40;       // Krylov subspace size per substep
    std::size_t max_substeps = 4096;  // per call to advance
};

struct StepStats {
    std::size_t substeps = 0;
    std::size_t matvecs = 0;
    double error_estimate = 0.0;   // summed a-posteriori estimates
};

/// Advances psi <- exp(-i H tau) psi, splitting tau until every substep's
/// error estimate beta_m |e_m^T exp(-i T h) e_1| is below tol * h / tau.
class LanczosPropagator {
public:
    LanczosPropagator(LinearMap h, std::size_t dim, KrylovOptions opts = {});

    StepStats advance(StateVector& psi, double tau, double tol);

private:
    LinearMap h_;
    std::size_t dim_;
    KrylovOptions opts_;
    double h_guess_ = 0.0;
    Eigen::MatrixXcd basis_;
    StateVector w_;
};

struct Eigenpair {
    double value = 0.0;
    StateVector vector;
    double residual = 0.0;
    std::size_t iterations = 0;
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization,
/// starting from `start`. Throws ConvergenceError after max_restarts.
Eigenpair lowest_eigenpair(const LinearMap& h, const StateVector& start, double tol = 1e-10,
                           std::size_t krylov_dim = 60, std::size_t max_restarts = 400);

}  // namespace fermi
