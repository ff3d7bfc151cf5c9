#include "fermi/krylov.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace fermi {

namespace {

struct Tridiagonal {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;   // beta[j] couples j and j+1; beta[m-1] is the residual norm
    std::size_t m = 0;
    bool invariant = false;
};

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diagonalize(const Tridiagonal& t) {
    const auto m = static_cast<Eigen::Index>(t.m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(t.beta.head(m - 1)) : Eigen::VectorXd();
    es.computeFromTridiagonal(t.alpha.head(m), sub, Eigen::ComputeEigenvectors);
    return es;
}

// Lanczos with full reorthogonalization; column 0 of v must be normalized.
// `stop(t)` is polled after each iteration and may end the recurrence early.
template <typename Stop>
Tridiagonal lanczos(const LinearMap& h, Eigen::MatrixXcd& v, StateVector& w, std::size_t max_dim,
                    std::size_t& matvecs, Stop&& stop) {
    Tridiagonal t;
    t.alpha.resize(static_cast<Eigen::Index>(max_dim));
    t.beta.resize(static_cast<Eigen::Index>(max_dim));
    double scale = 0.0;
    StateVector col;
    for (std::size_t j = 0; j < max_dim; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        col = v.col(jj);
        h(col, w);
        ++matvecs;
        const auto basis = v.leftCols(jj + 1);
        Eigen::VectorXcd proj = basis.adjoint() * w;
        t.alpha[jj] = proj[jj].real();
        double before = w.norm();
        w.noalias() -= basis * proj;
        double b = w.norm();
        // second pass only when cancellation was severe
        if (b < 0.7 * before) {
            proj = basis.adjoint() * w;
            w.noalias() -= basis * proj;
            b = w.norm();
        }
        t.beta[jj] = b;
        scale = std::max({scale, std::abs(t.alpha[jj]), b});
        t.m = j + 1;
        if (b <= 1e-13 * std::max(scale, 1.0)) {
            t.invariant = true;
            break;
        }
        if (j + 1 < max_dim) v.col(jj + 1) = w / b;
        if (stop(t)) break;
    }
    return t;
}

}  // namespace

LinearMap as_map(const SparseOperator& op) {
    return [&op](const StateVector& x, StateVector& y) { op.apply_into(x, y); };
}

LanczosPropagator::LanczosPropagator(LinearMap h, std::size_t dim, KrylovOptions opts)
    : h_(std::move(h)), dim_(dim), opts_(opts) {
    opts_.max_dim = std::max<std::size_t>(2, std::min(opts_.max_dim, dim_));
    basis_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(opts_.max_dim));
}

namespace {

// exp(-i T h) e_1 from the eigendecomposition of T.
Eigen::VectorXcd propagated(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, double h) {
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& u = es.eigenvectors();
    Eigen::VectorXcd phase(lam.size());
    for (Eigen::Index j = 0; j < lam.size(); ++j) phase[j] = std::exp(cplx(0.0, -lam[j] * h)) * u(0, j);
    return u.cast<cplx>() * phase;
}

}  // namespace

StepStats LanczosPropagator::advance(StateVector& psi, double tau, double tol) {
    StepStats stats;
    if (tau == 0.0) return stats;
    if (static_cast<std::size_t>(psi.size()) != dim_) throw std::invalid_argument("state dimension mismatch");
    const double nu = psi.norm();
    if (nu == 0.0) return stats;

    double done = 0.0;
    while (done < tau) {
        if (stats.substeps >= opts_.max_substeps) {
            throw ConvergenceError(
                fmt::format("Krylov propagation did not reach tolerance {} within {} substeps", tol, opts_.max_substeps),
                stats.error_estimate);
        }
        const double remaining = tau - done;
        const double target_h = h_guess_ > 0.0 ? std::min(remaining, 2.0 * h_guess_) : remaining;
        const double keep = psi.norm();
        basis_.col(0) = psi / keep;
        // grow the space until the full target step meets its share of the tolerance
        auto enough = [&](const Tridiagonal& t) {
            if (t.m < 4 || t.m % 2 != 0) return false;
            const auto es = diagonalize(t);
            const auto c = propagated(es, target_h);
            return t.beta[static_cast<Eigen::Index>(t.m) - 1] * std::abs(c[c.size() - 1]) * nu <=
                   tol * target_h / tau;
        };
        const Tridiagonal t = lanczos(h_, basis_, w_, opts_.max_dim, stats.matvecs, enough);
        const auto es = diagonalize(t);
        const auto m = static_cast<Eigen::Index>(t.m);
        const double beta_m = t.invariant ? 0.0 : t.beta[m - 1];

        double h = target_h;
        Eigen::VectorXcd c;
        double err = 0.0;
        for (int halvings = 0;; ++halvings) {
            c = propagated(es, h);
            err = beta_m * std::abs(c[m - 1]) * nu;
            if (err <= tol * h / tau || halvings > 60) break;
            h *= 0.5;
        }
        if (err > tol * h / tau) {
            throw ConvergenceError(fmt::format("Krylov error estimate {} above tolerance", err), err);
        }
        psi.noalias() = basis_.leftCols(m) * (keep * c);
        stats.error_estimate += err;
        ++stats.substeps;
        done += h;
        if (remaining - h <= 1e-14 * tau) done = tau;
        if (h < remaining) h_guess_ = h;
    }
    return stats;
}

Eigenpair lowest_eigenpair(const LinearMap& h, const StateVector& start, double tol, std::size_t krylov_dim,
                           std::size_t max_restarts) {
    const auto dim = static_cast<std::size_t>(start.size());
    if (start.norm() == 0.0) throw std::invalid_argument("start vector is zero");
    krylov_dim = std::max<std::size_t>(2, std::min(krylov_dim, dim));
    Eigen::MatrixXcd basis(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(krylov_dim));
    basis.col(0) = start / start.norm();
    StateVector w;
    StateVector hx;
    std::size_t matvecs = 0;
    Eigenpair best;
    for (std::size_t it = 0; it < max_restarts; ++it) {
        const Tridiagonal t = lanczos(h, basis, w, krylov_dim, matvecs, [](const Tridiagonal&) { return false; });
        const auto es = diagonalize(t);
        const auto m = static_cast<Eigen::Index>(t.m);
        StateVector x = basis.leftCols(m) * es.eigenvectors().col(0).cast<cplx>();
        x /= x.norm();
        h(x, hx);
        const double theta = x.dot(hx).real();
        const double residual = (hx - theta * x).norm();
        best = {theta, x, residual, it + 1};
        if (residual <= tol) return best;
        basis.col(0) = x;
    }
    throw ConvergenceError(fmt::format("lowest eigenpair not converged: residual {} after {} restarts", best.residual,
                                       max_restarts),
                           best.residual);
}

}  // namespace fermi
