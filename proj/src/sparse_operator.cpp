#include "fermi/sparse_operator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace fermi {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'S', 'O', 'P'};
constexpr std::uint32_t kDumpVersion = 1;

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("truncated operator dump");
    return value;
}

}  // namespace

SparseOperator SparseOperator::from_triplets(std::size_t dim, std::vector<Triplet> entries, bool hermitian) {
    if (dim > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("operator dimension exceeds 32-bit column range");
    }
    for (const auto& e : entries) {
        if (e.row >= dim || e.col >= dim) {
            throw std::invalid_argument(fmt::format("entry ({}, {}) outside dimension {}", e.row, e.col, dim));
        }
    }
    if (hermitian) {
        std::erase_if(entries, [](const Triplet& e) { return e.row > e.col; });
        const std::size_t upper = entries.size();
        entries.reserve(2 * upper);
        for (std::size_t i = 0; i < upper; ++i) {
            const auto& e = entries[i];
            if (e.row != e.col) entries.push_back({e.col, e.row, std::conj(e.value)});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
              [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

    SparseOperator op;
    op.dim_ = dim;
    op.hermitian_ = hermitian;
    op.row_ptr_.assign(dim + 1, 0);
    op.cols_.reserve(entries.size());
    op.values_.reserve(entries.size());
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        cplx sum = 0.0;
        // duplicates are summed in sorted order; a mirrored entry receives the
        // conjugate of each addend in the same order, so conj symmetry is exact
        while (j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col) {
            sum += entries[j].value;
            ++j;
        }
        if (hermitian && entries[i].row == entries[i].col) sum = {sum.real(), 0.0};
        if (sum != cplx(0.0)) {
            op.cols_.push_back(static_cast<std::uint32_t>(entries[i].col));
            op.values_.push_back(sum);
            ++op.row_ptr_[entries[i].row + 1];
        }
        i = j;
    }
    for (std::size_t r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
    return op;
}

SparseOperator SparseOperator::diagonal(const std::vector<double>& values) {
    SparseOperator op;
    op.dim_ = values.size();
    op.hermitian_ = true;
    op.row_ptr_.assign(values.size() + 1, 0);
    for (std::size_t r = 0; r < values.size(); ++r) {
        if (values[r] != 0.0) {
            op.cols_.push_back(static_cast<std::uint32_t>(r));
            op.values_.emplace_back(values[r], 0.0);
        }
        op.row_ptr_[r + 1] = op.cols_.size();
    }
    return op;
}

SparseOperator SparseOperator::identity(std::size_t dim) { return diagonal(std::vector<double>(dim, 1.0)); }

StateVector SparseOperator::apply(const StateVector& x) const {
    StateVector y(static_cast<Eigen::Index>(dim_));
    apply_into(x, y);
    return y;
}

void SparseOperator::apply_into(const StateVector& x, StateVector& y) const {
    if (static_cast<std::size_t>(x.size()) != dim_) {
        throw std::invalid_argument(fmt::format("vector of size {} applied to operator of dimension {}", x.size(), dim_));
    }
    if (static_cast<std::size_t>(y.size()) != dim_) y.resize(static_cast<Eigen::Index>(dim_));
    apply_rows(x, y, 0, dim_);
}

void SparseOperator::apply_rows(const StateVector& x, StateVector& y, std::size_t row_begin,
                                std::size_t row_end) const {
    const cplx* xp = x.data();
    for (std::size_t r = row_begin; r < row_end; ++r) {
        cplx acc = 0.0;
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += values_[p] * xp[cols_[p]];
        y[static_cast<Eigen::Index>(r)] = acc;
    }
}

cplx SparseOperator::at(std::size_t row, std::size_t col) const {
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
    if (it == last || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

bool SparseOperator::is_exactly_hermitian() const {
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            const cplx mirror = at(cols_[p], r);
            // exact equality; memcmp would tell -0.0 from 0.0 in conjugated real entries
            if (mirror != std::conj(values_[p])) return false;
        }
    }
    return true;
}

cplx SparseOperator::expectation(const StateVector& x) const {
    cplx acc = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
        cplx row = 0.0;
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) row += values_[p] * x[cols_[p]];
        acc += std::conj(x[static_cast<Eigen::Index>(r)]) * row;
    }
    return acc;
}

SparseOperator SparseOperator::adjoint() const {
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) t.push_back({cols_[p], r, std::conj(values_[p])});
    }
    auto out = from_triplets(dim_, std::move(t), false);
    out.hermitian_ = hermitian_;
    return out;
}

SparseOperator SparseOperator::operator*(const SparseOperator& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("operator product dimension mismatch");
    std::vector<Triplet> t;
    std::map<std::uint32_t, cplx> row;
    for (std::size_t r = 0; r < dim_; ++r) {
        row.clear();
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            const std::size_t k = cols_[p];
            for (std::uint64_t q = other.row_ptr_[k]; q < other.row_ptr_[k + 1]; ++q) {
                row[other.cols_[q]] += values_[p] * other.values_[q];
            }
        }
        for (const auto& [c, v] : row) t.push_back({r, c, v});
    }
    return from_triplets(dim_, std::move(t), false);
}

void SparseOperator::dump(std::ostream& out) const {
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kDumpVersion);
    put<std::uint64_t>(out, dim_);
    put<std::uint64_t>(out, values_.size());
    put<std::uint8_t>(out, hermitian_ ? 1 : 0);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            put<std::uint64_t>(out, r);
            put<std::uint64_t>(out, cols_[p]);
            put<double>(out, values_[p].real());
            put<double>(out, values_[p].imag());
        }
    }
}

SparseOperator SparseOperator::read(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error("not an operator dump");
    const auto version = get<std::uint32_t>(in);
    if (version != kDumpVersion) throw std::runtime_error(fmt::format("unsupported dump version {}", version));
    const auto dim = get<std::uint64_t>(in);
    const auto nnz = get<std::uint64_t>(in);
    const bool herm = get<std::uint8_t>(in) != 0;
    std::vector<Triplet> t;
    t.reserve(nnz);
    for (std::uint64_t i = 0; i < nnz; ++i) {
        const auto r = get<std::uint64_t>(in);
        const auto c = get<std::uint64_t>(in);
        const auto re = get<double>(in);
        const auto im = get<double>(in);
        t.push_back({r, c, {re, im}});
    }
    // the stored pattern is already exact; rebuild without re-mirroring
    auto op = from_triplets(dim, std::move(t), false);
    op.hermitian_ = herm;
    return op;
}

}  // namespace fermi
