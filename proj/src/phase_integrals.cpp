#include "fermi/phase_integrals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace fermi {

namespace {

constexpr std::size_t kMaxPoints = 8;
constexpr int kSeriesTerms = 28;

struct Points {
    std::array<cplx, kMaxPoints> z{};
    std::size_t n = 0;
};

Points without(const Points& p, std::size_t skip) {
    Points q;
    for (std::size_t i = 0; i < p.n; ++i) {
        if (i != skip) q.z[q.n++] = p.z[i];
    }
    return q;
}

// Taylor series of the divided difference about the centroid c:
// exp[z] = e^c sum_m h_m(z - c) / (n + m)!, h_m complete homogeneous.
cplx series(const Points& p) {
    const std::size_t order = p.n - 1;
    cplx c = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) c += p.z[i];
    c /= static_cast<double>(p.n);
    std::array<cplx, kSeriesTerms + 1> h{};
    h[0] = 1.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        const cplx y = p.z[i] - c;
        for (int m = 1; m <= kSeriesTerms; ++m) h[m] += y * h[m - 1];
    }
    double inv_fact = 1.0;
    for (std::size_t j = 2; j <= order; ++j) inv_fact /= static_cast<double>(j);
    cplx sum = 0.0;
    for (int m = 0; m <= kSeriesTerms; ++m) {
        sum += h[m] * inv_fact;
        inv_fact /= static_cast<double>(order + static_cast<std::size_t>(m) + 1);
    }
    return std::exp(c) * sum;
}

cplx dd(const Points& p) {
    if (p.n == 1) return std::exp(p.z[0]);
    std::size_t bi = 0;
    std::size_t bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        for (std::size_t j = i + 1; j < p.n; ++j) {
            const double d = std::abs(p.z[i] - p.z[j]);
            if (d > best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    }
    if (best <= 1.0) return series(p);
    // widely separated pair: the recurrence divides by a distance above 1
    return (dd(without(p, bi)) - dd(without(p, bj))) / (p.z[bj] - p.z[bi]);
}

// exp[i y_0, ..., i y_{n-1}] for sorted real points within 1 of each other,
// expanded about the first point (phase u0) in real arithmetic:
// (z - z_0)^m = i^m (y - y_0)^m.
cplx phase_series(const double* y, std::size_t n, cplx u0) {
    const std::size_t order = n - 1;
    const double c = y[0];
    std::array<double, kSeriesTerms + 1> h{};
    h[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - c;
        for (int m = 1; m <= kSeriesTerms; ++m) h[m] += d * h[m - 1];
    }
    double inv_fact = 1.0;
    for (std::size_t j = 2; j <= order; ++j) inv_fact /= static_cast<double>(j);
    // i^m cycles through 1, i, -1, -i
    double re = 0.0;
    double im = 0.0;
    for (int m = 0; m <= kSeriesTerms; ++m) {
        const double term = h[m] * inv_fact;
        switch (m & 3) {
            case 0: re += term; break;
            case 1: im += term; break;
            case 2: re -= term; break;
            default: im -= term; break;
        }
        inv_fact /= static_cast<double>(order + static_cast<std::size_t>(m) + 1);
    }
    return u0 * cplx(re, im);
}

// Divided differences over windows [i, j] of sorted points. Removing the
// extreme points only ever leaves contiguous windows, so they are memoized.
class PhaseWindows {
public:
    PhaseWindows(std::span<const double> y, std::span<const cplx> u) : n_(y.size()) {
        std::array<std::size_t, kMaxPoints> idx{};
        for (std::size_t i = 0; i < n_; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_),
                  [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
        for (std::size_t i = 0; i < n_; ++i) {
            y_[i] = y[idx[i]];
            u_[i] = u[idx[i]];
        }
    }

    cplx operator()(std::size_t i, std::size_t j) {
        if (i == j) return u_[i];
        const std::size_t key = i * kMaxPoints + j;
        if (done_ >> key & 1u) return memo_[key];
        cplx v;
        const double span = y_[j] - y_[i];
        if (span <= 1.0) {
            v = phase_series(y_.data() + i, j - i + 1, u_[i]);
        } else {
            v = ((*this)(i + 1, j) - (*this)(i, j - 1)) / cplx(0.0, span);
        }
        done_ |= std::uint64_t{1} << key;
        memo_[key] = v;
        return v;
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::array<double, kMaxPoints> y_{};
    std::array<cplx, kMaxPoints> u_{};
    std::array<cplx, kMaxPoints * kMaxPoints> memo_;
    std::uint64_t done_ = 0;
};

}  // namespace

cplx divided_difference_exp(std::span<const cplx> z) {
    if (z.empty() || z.size() > kMaxPoints) throw std::invalid_argument("divided difference needs 1 to 8 points");
    Points p;
    for (const auto& v : z) p.z[p.n++] = v;
    return dd(p);
}

cplx divided_difference_phase(std::span<const double> y, std::span<const cplx> u) {
    if (y.empty() || y.size() > kMaxPoints || u.size() != y.size()) {
        throw std::invalid_argument("divided difference needs 1 to 8 points with matching phases");
    }
    PhaseWindows w(y, u);
    return w(0, w.size() - 1);
}

cplx phase_integral(double a, double t) {
    const double x = a * t;
    if (std::abs(x) < 1e-6) {
        // t (1 + i x / 2 - x^2 / 6 - i x^3 / 24)
        return t * cplx(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
    }
    const double s = std::sin(0.5 * x);
    // (exp(i x) - 1) / (i a) with exp(i x) - 1 = -2 sin^2(x/2) + i sin(x)
    return cplx(std::sin(x), 2.0 * s * s) / a;
}

cplx ordered_phase_integral(std::span<const double> rates, double t) {
    const std::size_t n = rates.size();
    if (n == 0) return 1.0;
    if (n == 1) return phase_integral(rates[0], t);
    if (n + 1 > kMaxPoints) throw std::invalid_argument("ordered integral supports at most 7 vertices");
    // t^n exp[0, i a_n t, i (a_n + a_{n-1}) t, ..., i sum a t]
    Points p;
    p.z[p.n++] = 0.0;
    double acc = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        acc += rates[j];
        p.z[p.n++] = cplx(0.0, acc * t);
    }
    return std::pow(t, static_cast<double>(n)) * dd(p);
}

QuadratureRule gauss_legendre(double a, double b, std::size_t panels) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    QuadratureRule q;
    if (panels == 0) panels = 1;
    const double width = (b - a) / static_cast<double>(panels);
    q.nodes.reserve(panels * 20);
    q.weights.reserve(panels * 20);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * width;
        const double half = 0.5 * width;
        // 20 points: abscissae are the 10 non-negative roots, mirrored
        for (std::size_t i = 0; i < x.size(); ++i) {
            q.nodes.push_back(mid - half * x[i]);
            q.weights.push_back(half * w[i]);
            if (x[i] != 0.0) {
                q.nodes.push_back(mid + half * x[i]);
                q.weights.push_back(half * w[i]);
            }
        }
    }
    return q;
}

}  // namespace fermi
