#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fermi {

using cplx = std::complex<double>;
using StateVector = Eigen::VectorXcd;

struct Triplet {
    std::uint64_t row;
    std::uint64_t col;
    cplx value;
};

/// Compressed-row sparse operator with 32-bit column indices.
class SparseOperator {
public:
    SparseOperator() = default;

    /// Sums duplicates and drops exact zeros. When `hermitian` is set only
    /// entries with row <= col are read; the lower triangle is written as the
    /// exact complex conjugate and the diagonal is made real, so H == H^dagger
    /// holds exactly.
    static SparseOperator from_triplets(std::size_t dim, std::vector<Triplet> entries, bool hermitian);
    static SparseOperator diagonal(const std::vector<double>& values);
    static SparseOperator identity(std::size_t dim);

    std::size_t dimension() const { return dim_; }
    std::size_t nonzeros() const { return values_.size(); }
    bool hermitian() const { return hermitian_; }

    /// y = A x. Throws std::invalid_argument on dimension mismatch.
    StateVector apply(const StateVector& x) const;
    /// y = A x into caller storage; y must not alias x.
    void apply_into(const StateVector& x, StateVector& y) const;
    /// Rows [row_begin, row_end) of A x only; re-entrant for disjoint segments.
    void apply_rows(const StateVector& x, StateVector& y, std::size_t row_begin, std::size_t row_end) const;

    /// Element lookup, zero when absent.
    cplx at(std::size_t row, std::size_t col) const;
    /// Exact (not tolerance-based) check A == A^dagger over the stored pattern.
    bool is_exactly_hermitian() const;
    /// <x|A|x> for real-diagonal use; returns the full complex value.
    cplx expectation(const StateVector& x) const;

    SparseOperator adjoint() const;
    SparseOperator operator*(const SparseOperator& other) const;

    const std::vector<std::uint64_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& cols() const { return cols_; }
    const std::vector<cplx>& values() const { return values_; }

    /// Binary dump: magic "FSOP", u32 version, u64 dim, u64 nnz, u8 hermitian,
    /// then nnz records of (u64 row, u64 col, f64 re, f64 im); little-endian.
    void dump(std::ostream& out) const;
    static SparseOperator read(std::istream& in);

private:
    std::size_t dim_ = 0;
    bool hermitian_ = false;
    std::vector<std::uint64_t> row_ptr_{0};
    std::vector<std::uint32_t> cols_;
    std::vector<cplx> values_;
};

}  // namespace fermi
