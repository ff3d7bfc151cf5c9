#pragma once

// Time-dependent perturbation theory for the two-qubit line, from the bare
// state |e_A g_B 0>. Vertex weight of qubit J on mode k:
//   G_J(k) = d_J w_k exp(-i k x_J) exp(i phi),
// phi being an optional global vertex phase (zero by default). The
// Hamiltonian's creation vertex is -i G_J(k), its annihilation vertex i G_J*.

#include <vector>

#include "fermi/dynamics.hpp"
#include "fermi/model.hpp"
#include "fermi/phase_integrals.hpp"

namespace fermi {

struct PerturbationOptions {
    double vertex_phase = 0.0;
    /// Keep the symmetrized two-photon exchange term |sum_k u_k conj(v_k)|^2
    /// in the r-dependent joint probability.
    bool include_pair_term = true;
    /// Drop the M1 / dM3 interference (demonstrates the cancellation).
    bool omit_interference = false;
};

cplx vertex_weight(const RunConfig& cfg, Qubit q, std::size_t mode, double vertex_phase = 0.0);

/// S(dx, tau) = sum_n N omega_n dk w_c(omega_n) exp(i k_n dx - i omega_n tau) on listed lags.
struct KernelTable {
    double dx = 0.0;
    std::vector<double> taus;
    std::vector<cplx> values;
};

/// Throws ValidationError when a lag falls outside [-t_max, t_max].
KernelTable field_kernel(const RunConfig& cfg, double dx, const std::vector<double>& taus);
cplx kernel_value(const RunConfig& cfg, double dx, double tau);

/// R(tau) = int_0^tau Im S(dx, s) ds by the trapezoid rule on the table's
/// lags, then smoothed with a normalized Gaussian of width sigma. The lags
/// must be uniform and start at 0.
std::vector<double> retarded_response(const KernelTable& table, double sigma);
/// Lag of the maximum of retarded_response at tau > 0.
double retarded_peak(const KernelTable& table, double sigma);

/// |g_J 0> -> |e_J 1_k>: -G (exp(i (w + W) t) - 1) / (i (w + W)).
cplx amp_counter_emit(const RunConfig& cfg, Qubit q, std::size_t mode, double t, double vertex_phase = 0.0);
/// |e_J 0> -> |g_J 1_k>: same with w - W; series below |w - W| < 1e-6 W.
cplx amp_emit(const RunConfig& cfg, Qubit q, std::size_t mode, double t, double vertex_phase = 0.0);
/// |e_A g_B 0> -> |g_A e_B 0>, both orderings, closed-form time integrals.
cplx amp_exchange(const RunConfig& cfg, double t, double vertex_phase = 0.0);
/// Same amplitude as a kernel convolution evaluated by composite Gauss-Legendre.
cplx amp_exchange_kernel(const RunConfig& cfg, double t);
/// amp_emit(A, k2) * amp_counter_emit(B, k1).
cplx amp_pair(const RunConfig& cfg, std::size_t k1, std::size_t k2, double t, double vertex_phase = 0.0);

/// dM3(k, t) for final state |e_A e_B 1_k> for every mode k, closed-form
/// inner integrals with the intermediate-mode sum done once per |k|.
std::vector<cplx> amp_exchange_emit_all(const RunConfig& cfg, double t, double vertex_phase = 0.0);
cplx amp_exchange_emit(const RunConfig& cfg, std::size_t mode, double t, double vertex_phase = 0.0);
/// Slow path: the same sum with every triple time integral done by nested
/// Gauss-Legendre quadrature. Intended for a handful of modes.
cplx amp_exchange_emit_reference(const RunConfig& cfg, std::size_t mode, double t);

struct ProbabilityCurves {
    std::vector<double> times;
    std::vector<double> m1_sq;          // sum_k |amp_counter_emit(B, k)|^2
    std::vector<double> x_sq;           // |x|^2
    std::vector<double> pair_exchange;  // |sum_k amp_emit(A,k) conj(amp_counter_emit(B,k))|^2
    std::vector<double> interference;   // 2 Re sum_k conj(M1(k)) dM3(k)
    std::vector<double> p_r_eb_ga;      // r-dependent joint probability
    std::vector<double> p_r_eb;         // r-dependent excitation probability of B
};

ProbabilityCurves prob_curves(const RunConfig& cfg, const TimeGrid& grid, const PerturbationOptions& opts = {});

}  // namespace fermi
