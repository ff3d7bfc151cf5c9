#include "fermi/perturbation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace fermi {

namespace {

cplx unit(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Mode pairs (+k, -k) sit at indices 2n, 2n+1 and share omega and weight.
std::size_t branch_count(const RunConfig& cfg) { return cfg.mode_count() / 2; }

using Rates = std::array<double, 3>;
// integer coefficients of (omega_q, omega_k, Omega_A, Omega_B) in a rate
using Lin = std::array<int, 4>;

// Triple-vertex rate lists for intermediate photon q and surviving photon k,
// earliest vertex first. Chains 0-2 carry G_A(q) G_A(k) G_B*(q), chains 3-5
// G_B(q) G_A*(q) G_A(k).
constexpr std::array<std::array<Lin, 3>, 6> kChains{{
    {{{1, 0, -1, 0}, {0, 1, 1, 0}, {-1, 0, 0, 1}}},
    {{{1, 0, -1, 0}, {-1, 0, 0, 1}, {0, 1, 1, 0}}},
    {{{0, 1, -1, 0}, {1, 0, 1, 0}, {-1, 0, 0, 1}}},
    {{{1, 0, 0, 1}, {-1, 0, -1, 0}, {0, 1, 1, 0}}},
    {{{0, 1, -1, 0}, {1, 0, 0, 1}, {-1, 0, 1, 0}}},
    {{{1, 0, 0, 1}, {0, 1, -1, 0}, {-1, 0, 1, 0}}},
}};

double eval(const Lin& l, const std::array<double, 4>& w) {
    return l[0] * w[0] + l[1] * w[1] + l[2] * w[2] + l[3] * w[3];
}

struct ChainSet {
    std::array<Rates, 3> first;
    std::array<Rates, 3> second;
};

ChainSet chains(double wq, double wk, double oa, double ob) {
    const std::array<double, 4> w{wq, wk, oa, ob};
    ChainSet c;
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t v = 0; v < 3; ++v) {
            c.first[j][v] = eval(kChains[j][v], w);
            c.second[j][v] = eval(kChains[j + 3][v], w);
        }
    }
    return c;
}

// Partial sums of a chain from the latest vertex back: the divided-difference
// points of its ordered integral, excluding the leading zero.
std::array<Lin, 3> partial_sums(const std::array<Lin, 3>& chain) {
    std::array<Lin, 3> out{};
    Lin acc{0, 0, 0, 0};
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t c = 0; c < 4; ++c) acc[c] += chain[2 - j][c];
        out[j] = acc;
    }
    return out;
}

cplx power(cplx e, int n) {
    cplx r = 1.0;
    for (int i = 0; i < std::abs(n); ++i) r *= n > 0 ? e : std::conj(e);
    return r;
}

std::size_t panels_for(double rate, double length) {
    return static_cast<std::size_t>(std::ceil(std::abs(rate) * length / 6.0)) + 1;
}

// int_{0<s1<s2<s3<t} exp(i (a1 s1 + a2 s2 + a3 s3)) by nested Gauss-Legendre.
cplx nested_triple(const Rates& a, double t) {
    const double top = std::max({std::abs(a[0]), std::abs(a[0] + a[1]), std::abs(a[0] + a[1] + a[2]),
                                 std::abs(a[1]), std::abs(a[2]), 1.0});
    const auto outer = gauss_legendre(0.0, t, panels_for(top, t));
    cplx total = 0.0;
    for (std::size_t i3 = 0; i3 < outer.nodes.size(); ++i3) {
        const double s3 = outer.nodes[i3];
        const auto middle = gauss_legendre(0.0, s3, panels_for(top, s3));
        cplx mid_sum = 0.0;
        for (std::size_t i2 = 0; i2 < middle.nodes.size(); ++i2) {
            const double s2 = middle.nodes[i2];
            const auto inner = gauss_legendre(0.0, s2, panels_for(top, s2));
            cplx in_sum = 0.0;
            for (std::size_t i1 = 0; i1 < inner.nodes.size(); ++i1) {
                in_sum += inner.weights[i1] * unit(a[0] * inner.nodes[i1]);
            }
            mid_sum += middle.weights[i2] * unit(a[1] * s2) * in_sum;
        }
        total += outer.weights[i3] * unit(a[2] * s3) * mid_sum;
    }
    return total;
}

}  // namespace

cplx vertex_weight(const RunConfig& cfg, Qubit q, std::size_t mode, double vertex_phase) {
    const double g = cfg.coupling(q, mode);
    if (g == 0.0) return 0.0;
    return g * unit(vertex_phase - cfg.modes[mode].k * cfg.params.x(q));
}

KernelTable field_kernel(const RunConfig& cfg, double dx, const std::vector<double>& taus) {
    for (double tau : taus) {
        if (std::abs(tau) > cfg.disc.t_max * (1.0 + 1e-12)) {
            throw ValidationError("kernel.tau", fmt::format("lag {} outside [-t_max, t_max] = [-{}, {}]", tau,
                                                              cfg.disc.t_max, cfg.disc.t_max));
        }
    }
    KernelTable table;
    table.dx = dx;
    table.taus = taus;
    table.values.reserve(taus.size());
    for (double tau : taus) table.values.push_back(kernel_value(cfg, dx, tau));
    return table;
}

cplx kernel_value(const RunConfig& cfg, double dx, double tau) {
    // pair +k with -k so that the dx -> -dx and tau -> -tau symmetries hold bitwise
    cplx acc = 0.0;
    for (std::size_t n = 0; n < branch_count(cfg); ++n) {
        const Mode& m = cfg.modes[2 * n];
        const double w2 = m.weight * m.weight;
        acc += w2 * 2.0 * std::cos(m.k * dx) * unit(-m.omega * tau);
    }
    return acc;
}

std::vector<double> retarded_response(const KernelTable& table, double sigma) {
    const auto& tau = table.taus;
    const std::size_t n = tau.size();
    if (n < 2 || tau.front() != 0.0) throw ValidationError("kernel.tau", "lags must start at 0 with spacing");
    const double h = tau[1] - tau[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((tau[i] - tau[i - 1]) - h) > 1e-9 * h) {
            throw ValidationError("kernel.tau", "lags must be uniformly spaced");
        }
    }
    std::vector<double> cumulative(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cumulative[i] = cumulative[i - 1] + 0.5 * h * (table.values[i - 1].imag() + table.values[i].imag());
    }
    if (!(sigma > 0.0)) return cumulative;
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(5.0 * sigma / h));
    std::vector<double> kernel(static_cast<std::size_t>(2 * reach + 1));
    for (std::ptrdiff_t j = -reach; j <= reach; ++j) {
        const double u = static_cast<double>(j) * h / sigma;
        kernel[static_cast<std::size_t>(j + reach)] = std::exp(-0.5 * u * u);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        double norm = 0.0;
        for (std::ptrdiff_t j = -reach; j <= reach; ++j) {
            const auto idx = static_cast<std::ptrdiff_t>(i) + j;
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
            const double wgt = kernel[static_cast<std::size_t>(j + reach)];
            acc += wgt * cumulative[static_cast<std::size_t>(idx)];
            norm += wgt;
        }
        out[i] = acc / norm;
    }
    return out;
}

double retarded_peak(const KernelTable& table, double sigma) {
    const auto r = retarded_response(table, sigma);
    std::size_t best = 1;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i] > r[best]) best = i;
    }
    return table.taus[best];
}

cplx amp_counter_emit(const RunConfig& cfg, Qubit q, std::size_t mode, double t, double vertex_phase) {
    const double rate = cfg.modes[mode].omega + cfg.params.omega(q);
    return -vertex_weight(cfg, q, mode, vertex_phase) * phase_integral(rate, t);
}

cplx amp_emit(const RunConfig& cfg, Qubit q, std::size_t mode, double t, double vertex_phase) {
    const double big = cfg.params.omega(q);
    const double rate = cfg.modes[mode].omega - big;
    const cplx g = vertex_weight(cfg, q, mode, vertex_phase);
    if (std::abs(rate) < 1e-6 * big) {
        // second-order series in the detuning; exact limit -G t
        const double x = rate * t;
        return -g * t * cplx(1.0 - x * x / 6.0, x / 2.0);
    }
    return -g * phase_integral(rate, t);
}

cplx amp_exchange(const RunConfig& cfg, double t, double vertex_phase) {
    if (cfg.d_a == 0.0 || cfg.d_b == 0.0 || t == 0.0) return 0.0;
    const double oa = cfg.params.omega_a;
    const double ob = cfg.params.omega_b;
    cplx x = 0.0;
    for (std::size_t m = 0; m < cfg.mode_count(); ++m) {
        const double w = cfg.modes[m].omega;
        const cplx ga = vertex_weight(cfg, Qubit::A, m, vertex_phase);
        const cplx gb = vertex_weight(cfg, Qubit::B, m, vertex_phase);
        const std::array<double, 2> rot{w - oa, ob - w};
        const std::array<double, 2> counter{w + ob, -oa - w};
        x -= ga * std::conj(gb) * ordered_phase_integral(rot, t) +
             gb * std::conj(ga) * ordered_phase_integral(counter, t);
    }
    return x;
}

cplx amp_exchange_kernel(const RunConfig& cfg, double t) {
    if (cfg.d_a == 0.0 || cfg.d_b == 0.0 || t == 0.0) return 0.0;
    const double oa = cfg.params.omega_a;
    const double ob = cfg.params.omega_b;
    const double dx = cfg.params.x_b - cfg.params.x_a;
    const double top = cfg.disc.omega_max + std::max(oa, ob);
    const auto rule = gauss_legendre(0.0, t, static_cast<std::size_t>(std::ceil(top * t / 1.5)) + 1);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double tau = rule.nodes[i];
        const cplx inner = kernel_value(cfg, dx, tau) * unit(ob * tau) + kernel_value(cfg, -dx, tau) * unit(-oa * tau);
        acc += rule.weights[i] * inner * phase_integral(ob - oa, t - tau);
    }
    return -cfg.d_a * cfg.d_b * acc;
}

cplx amp_pair(const RunConfig& cfg, std::size_t k1, std::size_t k2, double t, double vertex_phase) {
    return amp_emit(cfg, Qubit::A, k2, t, vertex_phase) * amp_counter_emit(cfg, Qubit::B, k1, t, vertex_phase);
}

std::vector<cplx> amp_exchange_emit_all(const RunConfig& cfg, double t, double vertex_phase) {
    std::vector<cplx> out(cfg.mode_count(), 0.0);
    if (cfg.d_a == 0.0 || cfg.d_b == 0.0 || t == 0.0) return out;
    const double oa = cfg.params.omega_a;
    const double ob = cfg.params.omega_b;
    const double dx = cfg.params.x_b - cfg.params.x_a;
    const std::size_t branches = branch_count(cfg);
    // sum over +-q of G_A(q) G_B*(q), equal to that of G_B(q) G_A*(q)
    std::vector<double> c(branches);
    std::vector<cplx> phase(branches);
    for (std::size_t n = 0; n < branches; ++n) {
        const Mode& m = cfg.modes[2 * n];
        c[n] = 2.0 * cfg.d_a * cfg.d_b * m.weight * m.weight * std::cos(m.k * dx);
        phase[n] = unit(m.omega * t);
    }
    std::array<std::array<Lin, 3>, 6> points{};
    for (std::size_t j = 0; j < 6; ++j) points[j] = partial_sums(kChains[j]);
    const cplx ea = unit(oa * t);
    const cplx eb = unit(ob * t);
    const double t3 = t * t * t;

    std::array<double, 4> y{};
    std::array<cplx, 4> u{};
    y[0] = 0.0;
    u[0] = 1.0;
    for (std::size_t nk = 0; nk < branches; ++nk) {
        const double wk = cfg.modes[2 * nk].omega;
        cplx bracket = 0.0;
        for (std::size_t nq = 0; nq < branches; ++nq) {
            if (c[nq] == 0.0) continue;
            const std::array<double, 4> w{cfg.modes[2 * nq].omega, wk, oa, ob};
            cplx s = 0.0;
            for (const auto& chain : points) {
                for (std::size_t j = 0; j < 3; ++j) {
                    const Lin& l = chain[j];
                    y[j + 1] = eval(l, w) * t;
                    u[j + 1] = power(phase[nq], l[0]) * power(phase[nk], l[1]) * power(ea, l[2]) * power(eb, l[3]);
                }
                s += divided_difference_phase(y, u);
            }
            bracket += c[nq] * s;
        }
        bracket *= t3;
        out[2 * nk] = vertex_weight(cfg, Qubit::A, 2 * nk, vertex_phase) * bracket;
        out[2 * nk + 1] = vertex_weight(cfg, Qubit::A, 2 * nk + 1, vertex_phase) * bracket;
    }
    return out;
}

cplx amp_exchange_emit(const RunConfig& cfg, std::size_t mode, double t, double vertex_phase) {
    if (cfg.d_a == 0.0 || cfg.d_b == 0.0 || t == 0.0) return 0.0;
    const double oa = cfg.params.omega_a;
    const double ob = cfg.params.omega_b;
    const double wk = cfg.modes[mode].omega;
    cplx acc = 0.0;
    for (std::size_t q = 0; q < cfg.mode_count(); ++q) {
        const cplx ga = vertex_weight(cfg, Qubit::A, q, vertex_phase);
        const cplx gb = vertex_weight(cfg, Qubit::B, q, vertex_phase);
        const auto ch = chains(cfg.modes[q].omega, wk, oa, ob);
        cplx s1 = 0.0;
        cplx s2 = 0.0;
        for (const auto& r : ch.first) s1 += ordered_phase_integral(r, t);
        for (const auto& r : ch.second) s2 += ordered_phase_integral(r, t);
        acc += ga * std::conj(gb) * s1 + gb * std::conj(ga) * s2;
    }
    return vertex_weight(cfg, Qubit::A, mode, vertex_phase) * acc;
}

cplx amp_exchange_emit_reference(const RunConfig& cfg, std::size_t mode, double t) {
    if (cfg.d_a == 0.0 || cfg.d_b == 0.0 || t == 0.0) return 0.0;
    const double oa = cfg.params.omega_a;
    const double ob = cfg.params.omega_b;
    const double wk = cfg.modes[mode].omega;
    cplx acc = 0.0;
    for (std::size_t q = 0; q < cfg.mode_count(); ++q) {
        const cplx ga = vertex_weight(cfg, Qubit::A, q);
        const cplx gb = vertex_weight(cfg, Qubit::B, q);
        const auto ch = chains(cfg.modes[q].omega, wk, oa, ob);
        cplx s1 = 0.0;
        cplx s2 = 0.0;
        for (const auto& r : ch.first) s1 += nested_triple(r, t);
        for (const auto& r : ch.second) s2 += nested_triple(r, t);
        acc += ga * std::conj(gb) * s1 + gb * std::conj(ga) * s2;
    }
    return vertex_weight(cfg, Qubit::A, mode) * acc;
}

ProbabilityCurves prob_curves(const RunConfig& cfg, const TimeGrid& grid, const PerturbationOptions& opts) {
    check_grid(grid, cfg.disc);
    ProbabilityCurves out;
    const std::size_t m = cfg.mode_count();
    for (std::size_t i = 0; i < grid.points(); ++i) {
        const double t = grid.time(i);
        double m1 = 0.0;
        cplx pair = 0.0;
        std::vector<cplx> b(m);
        for (std::size_t k = 0; k < m; ++k) {
            b[k] = amp_counter_emit(cfg, Qubit::B, k, t, opts.vertex_phase);
            m1 += std::norm(b[k]);
            pair += amp_emit(cfg, Qubit::A, k, t, opts.vertex_phase) * std::conj(b[k]);
        }
        const cplx x = amp_exchange(cfg, t, opts.vertex_phase);
        double interference = 0.0;
        if (!opts.omit_interference) {
            const auto dm3 = amp_exchange_emit_all(cfg, t, opts.vertex_phase);
            cplx acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += std::conj(b[k]) * dm3[k];
            interference = 2.0 * acc.real();
        }
        const double x2 = std::norm(x);
        const double e = std::norm(pair);
        out.times.push_back(t);
        out.m1_sq.push_back(m1);
        out.x_sq.push_back(x2);
        out.pair_exchange.push_back(e);
        out.interference.push_back(interference);
        const double joint = x2 + (opts.include_pair_term ? e : 0.0);
        out.p_r_eb_ga.push_back(joint);
        out.p_r_eb.push_back(joint + interference);
    }
    return out;
}

}  // namespace fermi
