#pragma once

// Excitation-truncated Fock basis for two qubits and M bosonic modes.
//
// Index layout: sector-major, sector = 2 * [A excited] + [B excited]. Inside a
// sector, photon configurations are graded by total photon number and, within
// a grade, ordered lexicographically by their sorted tuple of mode indices.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fermi {

/// Photon configuration as a non-decreasing list of occupied mode indices.
/// {} is the vacuum, {3, 3} is two photons in mode 3.
using ModeTuple = std::vector<std::uint32_t>;

struct BasisState {
    bool excited_a = false;
    bool excited_b = false;
    ModeTuple photons;

    bool operator==(const BasisState&) const = default;
};

inline constexpr std::size_t kDefaultDimensionCap = 40'000'000;

class FockBasis {
public:
    /// Throws ValidationError for M == 0, ResourceError above the cap.
    FockBasis(std::size_t modes, std::size_t n_max, std::size_t dimension_cap = kDefaultDimensionCap);

    std::size_t modes() const { return modes_; }
    std::size_t n_max() const { return n_max_; }
    std::size_t dimension() const { return 4 * configs_; }
    /// Number of photon configurations per qubit sector.
    std::size_t config_count() const { return configs_; }
    /// First configuration index of the grade with `photons` quanta.
    std::size_t grade_offset(std::size_t photons) const { return grade_offset_[photons]; }

    std::size_t rank(const BasisState& s) const;
    BasisState unrank(std::size_t index) const;

    std::size_t config_rank(std::span<const std::uint32_t> photons) const;
    /// Sorted mode tuple of configuration c; valid while the basis lives.
    std::span<const std::uint32_t> config(std::size_t c) const;
    std::size_t photon_count(std::size_t c) const;
    /// Occupation number of `mode` in configuration c.
    std::uint32_t occupation(std::size_t c, std::uint32_t mode) const;
    std::vector<std::uint32_t> occupation_vector(std::size_t c) const;

    static std::size_t sector(bool excited_a, bool excited_b) { return 2 * excited_a + excited_b; }
    std::size_t index(std::size_t sector, std::size_t config) const { return sector * configs_ + config; }

    /// Dimension formula 4 * sum_j C(M + j - 1, j) without building anything.
    /// Returns SIZE_MAX on overflow.
    static std::size_t predicted_dimension(std::size_t modes, std::size_t n_max);

private:
    std::size_t count_tail(std::size_t length, std::size_t min_value) const;

    std::size_t modes_;
    std::size_t n_max_;
    std::size_t configs_ = 0;
    std::vector<std::size_t> grade_offset_;
    // cnt_[s][v] = number of non-decreasing tuples of length s over [v, M)
    std::vector<std::vector<std::size_t>> cnt_;
    // flat storage, n_max slots per configuration; length in photon_count_
    std::vector<std::uint32_t> table_;
    std::vector<std::uint8_t> photon_count_;
};

}  // namespace fermi
