#pragma once

// H = Omega_A/2 sz_A + Omega_B/2 sz_B + sum_n omega_n b_n^dag b_n
//     + sum_J d_J sx_J V(x_J),
// V(x) = i sum_n w_n exp(i k_n x) b_n + h.c., w_n = sqrt(N omega_n dk w_c).
// The photon-creation vertex of qubit J on mode n therefore carries
// -i d_J w_n exp(-i k_n x_J), the annihilation vertex its conjugate.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fermi/basis.hpp"
#include "fermi/model.hpp"
#include "fermi/sparse_operator.hpp"

namespace fermi {

struct HamiltonianOptions {
    /// Drop sigma+ b^dag and sigma- b. Test fixture only.
    bool rwa = false;
};

/// Creation vertex amplitude -i d_J w_n exp(-i k_n x_J).
cplx creation_vertex(const RunConfig& cfg, Qubit q, std::size_t mode);

/// Photon-space creation map: for every configuration below the truncation
/// and every mode, the target configuration and sqrt(n_m + 1).
class LadderTable {
public:
    explicit LadderTable(const FockBasis& basis);

    std::size_t lower_configs() const { return lower_; }
    std::size_t modes() const { return modes_; }
    std::uint32_t target(std::size_t config, std::size_t mode) const { return target_[config * modes_ + mode]; }
    double factor(std::size_t config, std::size_t mode) const { return factor_[config * modes_ + mode]; }

private:
    std::size_t lower_ = 0;
    std::size_t modes_ = 0;
    std::vector<std::uint32_t> target_;
    std::vector<double> factor_;
};

/// Stored Hermitian Hamiltonian. Throws ValidationError when the basis mode
/// count or truncation disagrees with cfg.
SparseOperator build_hamiltonian(const RunConfig& cfg, const FockBasis& basis, HamiltonianOptions opts = {});

/// Matrix-free application of the same Hamiltonian.
class HamiltonianAction {
public:
    HamiltonianAction(const RunConfig& cfg, const FockBasis& basis, HamiltonianOptions opts = {});

    std::size_t dimension() const { return dim_; }
    void apply(const StateVector& x, StateVector& y) const;

private:
    const FockBasis* basis_;
    LadderTable ladder_;
    std::size_t dim_;
    bool rwa_;
    std::vector<double> diag_;
    std::vector<cplx> vertex_a_;
    std::vector<cplx> vertex_b_;
};

/// Per-state energy of H0.
std::vector<double> bare_energies(const RunConfig& cfg, const FockBasis& basis);

enum class Selector { ExcitedA, GroundA, ExcitedB, GroundB, JointExcitedBGroundA, PhotonNumber, ExcitationNumber };

Selector selector_from_string(const std::string& name);
std::string to_string(Selector s);

/// Diagonal weights of the selected operator, one per basis state.
std::vector<double> projector_weights(const FockBasis& basis, Selector which);
SparseOperator projector(const FockBasis& basis, Selector which);

/// sum_i w_i |x_i|^2, in index order.
double diagonal_expectation(const std::vector<double>& weights, const StateVector& x);

}  // namespace fermi
