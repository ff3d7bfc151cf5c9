#include "fermi/basis.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "fermi/model.hpp"

namespace fermi {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t sat_add(std::size_t a, std::size_t b) {
    return (a > kSaturated - b) ? kSaturated : a + b;
}

// C(n, k) with saturation.
std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > kSaturated) return kSaturated;
    }
    return static_cast<std::size_t>(acc);
}

}  // namespace

std::size_t FockBasis::predicted_dimension(std::size_t modes, std::size_t n_max) {
    std::size_t total = 0;
    for (std::size_t j = 0; j <= n_max; ++j) {
        if (modes == 0 && j > 0) break;
        total = sat_add(total, binomial(modes + j - 1, j));
    }
    if (total > kSaturated / 4) return kSaturated;
    return 4 * total;
}

FockBasis::FockBasis(std::size_t modes, std::size_t n_max, std::size_t dimension_cap)
    : modes_(modes), n_max_(n_max) {
    if (modes == 0) throw ValidationError("basis.modes", "need at least one mode");
    if (n_max > 255) throw ValidationError("basis.n_max", "photon truncation above 255 is not supported");
    const std::size_t dim = predicted_dimension(modes, n_max);
    if (dim > dimension_cap) {
        throw ResourceError(fmt::format("Fock basis for M = {}, n_max = {} has dimension {} above the cap {}", modes,
                                        n_max, dim == kSaturated ? std::string("(overflow)") : std::to_string(dim),
                                        dimension_cap));
    }
    configs_ = dim / 4;

    cnt_.assign(n_max + 1, std::vector<std::size_t>(modes + 1, 0));
    for (std::size_t s = 0; s <= n_max; ++s) {
        for (std::size_t v = 0; v <= modes; ++v) {
            cnt_[s][v] = s == 0 ? 1 : binomial(modes - v + s - 1, s);
        }
    }
    grade_offset_.assign(n_max + 2, 0);
    for (std::size_t j = 0; j <= n_max; ++j) grade_offset_[j + 1] = grade_offset_[j] + cnt_[j][0];

    const std::size_t slots = std::max<std::size_t>(n_max, 1);
    table_.assign(configs_ * slots, 0);
    photon_count_.assign(configs_, 0);

    std::size_t c = 0;
    std::vector<std::uint32_t> tuple;
    for (std::size_t j = 0; j <= n_max; ++j) {
        tuple.assign(j, 0);
        while (true) {
            std::copy(tuple.begin(), tuple.end(), table_.begin() + static_cast<std::ptrdiff_t>(c * slots));
            photon_count_[c] = static_cast<std::uint8_t>(j);
            ++c;
            // next non-decreasing tuple in lexicographic order
            std::ptrdiff_t p = static_cast<std::ptrdiff_t>(j) - 1;
            while (p >= 0 && tuple[static_cast<std::size_t>(p)] + 1 == modes) --p;
            if (p < 0) break;
            const std::uint32_t next = tuple[static_cast<std::size_t>(p)] + 1;
            for (std::size_t q = static_cast<std::size_t>(p); q < j; ++q) tuple[q] = next;
        }
    }
}

std::size_t FockBasis::count_tail(std::size_t length, std::size_t min_value) const {
    return cnt_[length][min_value];
}

std::size_t FockBasis::config_rank(std::span<const std::uint32_t> photons) const {
    const std::size_t j = photons.size();
    if (j > n_max_) throw ValidationError("basis.state", "photon number above truncation");
    std::size_t r = grade_offset_[j];
    std::uint32_t lower = 0;
    for (std::size_t p = 0; p < j; ++p) {
        const std::uint32_t a = photons[p];
        if (a >= modes_ || a < lower) throw ValidationError("basis.state", "mode tuple must be sorted and in range");
        // tuples agreeing on the first p entries with a smaller p-th entry
        const std::size_t s = j - p - 1;
        for (std::uint32_t v = lower; v < a; ++v) r += count_tail(s, v);
        lower = a;
    }
    return r;
}

std::size_t FockBasis::rank(const BasisState& s) const {
    return index(sector(s.excited_a, s.excited_b), config_rank(s.photons));
}

BasisState FockBasis::unrank(std::size_t i) const {
    if (i >= dimension()) throw ValidationError("basis.index", fmt::format("index {} out of range", i));
    const std::size_t sec = i / configs_;
    const auto cfg = config(i % configs_);
    return {(sec & 2) != 0, (sec & 1) != 0, ModeTuple(cfg.begin(), cfg.end())};
}

std::span<const std::uint32_t> FockBasis::config(std::size_t c) const {
    const std::size_t slots = std::max<std::size_t>(n_max_, 1);
    return {table_.data() + c * slots, photon_count_[c]};
}

std::size_t FockBasis::photon_count(std::size_t c) const { return photon_count_[c]; }

std::uint32_t FockBasis::occupation(std::size_t c, std::uint32_t mode) const {
    const auto cfg = config(c);
    return static_cast<std::uint32_t>(std::count(cfg.begin(), cfg.end(), mode));
}

std::vector<std::uint32_t> FockBasis::occupation_vector(std::size_t c) const {
    std::vector<std::uint32_t> occ(modes_, 0);
    for (auto m : config(c)) ++occ[m];
    return occ;
}

}  // namespace fermi
