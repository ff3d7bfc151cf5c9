#include "fermi/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace fermi {

namespace {

void check_match(const RunConfig& cfg, const FockBasis& basis) {
    std::vector<Issue> issues;
    if (basis.modes() != cfg.mode_count()) {
        issues.push_back({"basis.modes", fmt::format("basis has {} modes, configuration {}", basis.modes(),
                                                     cfg.mode_count())});
    }
    if (basis.n_max() != cfg.disc.n_max) {
        issues.push_back({"basis.n_max", fmt::format("basis truncation {} differs from configuration {}",
                                                     basis.n_max(), cfg.disc.n_max)});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

// Flip qubit J in sector s.
std::size_t flip(std::size_t sector, Qubit q) { return sector ^ (q == Qubit::A ? 2u : 1u); }
bool is_excited(std::size_t sector, Qubit q) { return (sector & (q == Qubit::A ? 2u : 1u)) != 0; }

std::vector<cplx> vertices(const RunConfig& cfg, Qubit q) {
    std::vector<cplx> v(cfg.mode_count());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = creation_vertex(cfg, q, m);
    return v;
}

}  // namespace

cplx creation_vertex(const RunConfig& cfg, Qubit q, std::size_t mode) {
    const double g = cfg.coupling(q, mode);
    if (g == 0.0) return 0.0;
    const double phase = -cfg.modes[mode].k * cfg.params.x(q);
    return cplx(0.0, -g) * cplx(std::cos(phase), std::sin(phase));
}

LadderTable::LadderTable(const FockBasis& basis) : modes_(basis.modes()) {
    const std::size_t n_max = basis.n_max();
    lower_ = n_max == 0 ? 0 : basis.grade_offset(n_max);
    target_.resize(lower_ * modes_);
    factor_.resize(lower_ * modes_);
    std::vector<std::uint32_t> tuple;
    for (std::size_t c = 0; c < lower_; ++c) {
        const auto cfg = basis.config(c);
        for (std::size_t m = 0; m < modes_; ++m) {
            tuple.assign(cfg.begin(), cfg.end());
            const auto mode = static_cast<std::uint32_t>(m);
            const auto occupied = static_cast<std::size_t>(std::count(tuple.begin(), tuple.end(), mode));
            tuple.insert(std::upper_bound(tuple.begin(), tuple.end(), mode), mode);
            target_[c * modes_ + m] = static_cast<std::uint32_t>(basis.config_rank(tuple));
            factor_[c * modes_ + m] = std::sqrt(static_cast<double>(occupied + 1));
        }
    }
}

std::vector<double> bare_energies(const RunConfig& cfg, const FockBasis& basis) {
    const std::size_t nc = basis.config_count();
    std::vector<double> photon_energy(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        double e = 0.0;
        for (auto m : basis.config(c)) e += cfg.modes[m].omega;
        photon_energy[c] = e;
    }
    std::vector<double> diag(basis.dimension());
    for (std::size_t s = 0; s < 4; ++s) {
        const double qubit = 0.5 * cfg.params.omega_a * (is_excited(s, Qubit::A) ? 1.0 : -1.0) +
                             0.5 * cfg.params.omega_b * (is_excited(s, Qubit::B) ? 1.0 : -1.0);
        for (std::size_t c = 0; c < nc; ++c) diag[basis.index(s, c)] = qubit + photon_energy[c];
    }
    return diag;
}

SparseOperator build_hamiltonian(const RunConfig& cfg, const FockBasis& basis, HamiltonianOptions opts) {
    check_match(cfg, basis);
    const LadderTable ladder(basis);
    const auto diag = bare_energies(cfg, basis);
    std::vector<Triplet> entries;
    entries.reserve(diag.size() + 8 * ladder.lower_configs() * ladder.modes());
    for (std::size_t i = 0; i < diag.size(); ++i) entries.push_back({i, i, diag[i]});

    for (Qubit q : {Qubit::A, Qubit::B}) {
        if (cfg.dipole(q) == 0.0) continue;
        const auto vtx = vertices(cfg, q);
        for (std::size_t s = 0; s < 4; ++s) {
            // under RWA a photon is only created while the qubit drops
            if (opts.rwa && !is_excited(s, q)) continue;
            const std::size_t s2 = flip(s, q);
            for (std::size_t c = 0; c < ladder.lower_configs(); ++c) {
                const std::uint64_t col = basis.index(s, c);
                for (std::size_t m = 0; m < ladder.modes(); ++m) {
                    const std::uint64_t row = basis.index(s2, ladder.target(c, m));
                    const cplx value = vtx[m] * ladder.factor(c, m);
                    if (row <= col) {
                        entries.push_back({row, col, value});
                    } else {
                        entries.push_back({col, row, std::conj(value)});
                    }
                }
            }
        }
    }
    return SparseOperator::from_triplets(basis.dimension(), std::move(entries), true);
}

HamiltonianAction::HamiltonianAction(const RunConfig& cfg, const FockBasis& basis, HamiltonianOptions opts)
    : basis_(&basis), ladder_((check_match(cfg, basis), basis)), dim_(basis.dimension()), rwa_(opts.rwa),
      diag_(bare_energies(cfg, basis)), vertex_a_(vertices(cfg, Qubit::A)), vertex_b_(vertices(cfg, Qubit::B)) {
    if (cfg.d_a == 0.0) vertex_a_.clear();
    if (cfg.d_b == 0.0) vertex_b_.clear();
}

void HamiltonianAction::apply(const StateVector& x, StateVector& y) const {
    if (static_cast<std::size_t>(x.size()) != dim_) throw std::invalid_argument("dimension mismatch in apply");
    y.resize(static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < dim_; ++i) y[static_cast<Eigen::Index>(i)] = diag_[i] * x[static_cast<Eigen::Index>(i)];
    const std::size_t nc = basis_->config_count();
    const std::size_t modes = ladder_.modes();
    for (Qubit q : {Qubit::A, Qubit::B}) {
        const auto& vtx = q == Qubit::A ? vertex_a_ : vertex_b_;
        if (vtx.empty()) continue;
        for (std::size_t s = 0; s < 4; ++s) {
            if (rwa_ && !is_excited(s, q)) continue;
            const std::size_t s2 = flip(s, q);
            const cplx* xs = x.data() + s * nc;
            const cplx* xs2 = x.data() + s2 * nc;
            cplx* ys = y.data() + s * nc;
            cplx* ys2 = y.data() + s2 * nc;
            for (std::size_t c = 0; c < ladder_.lower_configs(); ++c) {
                cplx back = 0.0;
                for (std::size_t m = 0; m < modes; ++m) {
                    const std::uint32_t t = ladder_.target(c, m);
                    const cplx a = vtx[m] * ladder_.factor(c, m);
                    ys2[t] += a * xs[c];
                    back += std::conj(a) * xs2[t];
                }
                ys[c] += back;
            }
        }
    }
}

Selector selector_from_string(const std::string& name) {
    if (name == "eA") return Selector::ExcitedA;
    if (name == "gA") return Selector::GroundA;
    if (name == "eB") return Selector::ExcitedB;
    if (name == "gB") return Selector::GroundB;
    if (name == "eB_gA") return Selector::JointExcitedBGroundA;
    if (name == "photons") return Selector::PhotonNumber;
    if (name == "excitations") return Selector::ExcitationNumber;
    throw ValidationError("selector", fmt::format("unknown projector '{}'", name));
}

std::string to_string(Selector s) {
    switch (s) {
        case Selector::ExcitedA: return "eA";
        case Selector::GroundA: return "gA";
        case Selector::ExcitedB: return "eB";
        case Selector::GroundB: return "gB";
        case Selector::JointExcitedBGroundA: return "eB_gA";
        case Selector::PhotonNumber: return "photons";
        case Selector::ExcitationNumber: return "excitations";
    }
    return "?";
}

std::vector<double> projector_weights(const FockBasis& basis, Selector which) {
    const std::size_t nc = basis.config_count();
    std::vector<double> w(basis.dimension(), 0.0);
    for (std::size_t s = 0; s < 4; ++s) {
        const bool ea = is_excited(s, Qubit::A);
        const bool eb = is_excited(s, Qubit::B);
        for (std::size_t c = 0; c < nc; ++c) {
            double value = 0.0;
            switch (which) {
                case Selector::ExcitedA: value = ea; break;
                case Selector::GroundA: value = !ea; break;
                case Selector::ExcitedB: value = eb; break;
                case Selector::GroundB: value = !eb; break;
                case Selector::JointExcitedBGroundA: value = eb && !ea; break;
                case Selector::PhotonNumber: value = static_cast<double>(basis.photon_count(c)); break;
                case Selector::ExcitationNumber:
                    value = static_cast<double>(basis.photon_count(c)) + ea + eb;
                    break;
            }
            w[basis.index(s, c)] = value;
        }
    }
    return w;
}

SparseOperator projector(const FockBasis& basis, Selector which) {
    return SparseOperator::diagonal(projector_weights(basis, which));
}

double diagonal_expectation(const std::vector<double>& weights, const StateVector& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] != 0.0) acc += weights[i] * std::norm(x[static_cast<Eigen::Index>(i)]);
    }
    return acc;
}

}  // namespace fermi
