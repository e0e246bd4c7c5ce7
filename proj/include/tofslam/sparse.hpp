#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tofslam {

class SparseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public SparseError {
public:
    NotPositiveDefinite() : SparseError("matrix not positive definite") {}
};

/// Lower triangle (diagonal included) of a symmetric matrix in compressed sparse row form.
///
/// Entries are appended row by row with strictly increasing columns, so the three arrays
/// only ever grow. Structural zeros inserted explicitly are kept as slots and counted in
/// nnz(). Call finalize() once the last row is written; row_pointer() then has dim + 1
/// entries.
class CsrLower {
public:
    CsrLower() = default;
    explicit CsrLower(std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t nnz() const { return values_.size(); }
    bool finalized() const { return finalized_; }

    /// Appends (i, j, v). Requires j <= i and (i, j) after the last inserted slot in
    /// row-major order.
    void insert(std::size_t i, std::size_t j, double v);
    /// Accumulates into an existing slot; throws SparseError if (i, j) has no slot.
    void add_to(std::size_t i, std::size_t j, double v);
    void finalize();

    std::optional<std::size_t> find(std::size_t i, std::size_t j) const;
    /// Symmetric read access: at(i, j) == at(j, i); zero when no slot exists.
    double at(std::size_t i, std::size_t j) const;

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const std::size_t> col_index() const { return col_index_; }
    std::span<const std::size_t> row_pointer() const { return row_pointer_; }

    std::size_t row_begin(std::size_t i) const { return row_pointer_[i]; }
    std::size_t row_end(std::size_t i) const { return row_pointer_[i + 1]; }

    void set_zero();

private:
    void require_row(std::size_t i) const;

    std::size_t dim_ = 0;
    std::vector<double> values_;
    std::vector<std::size_t> col_index_;
    std::vector<std::size_t> row_pointer_{0};
    std::size_t open_row_ = 0;
    bool finalized_ = false;
};

/// Writes one "row col value" line per stored slot.
void write_triplets(std::ostream& os, const CsrLower& m);

/// Symmetric permutation: new index k holds old index new_to_old[k].
struct Permutation {
    std::vector<std::size_t> new_to_old;

    static Permutation identity(std::size_t n);
    std::size_t size() const { return new_to_old.size(); }
    std::vector<std::size_t> old_to_new() const;
    bool is_bijection() const;
};

/// max(i - j) over stored slots.
std::size_t bandwidth(const CsrLower& m);

/// Reverse Cuthill-McKee ordering of the pattern of `m`. Each connected component starts
/// at its minimum-degree node (lowest index on ties); components are emitted in ascending
/// order of their start node; neighbors are queued by ascending degree, then index. The
/// whole Cuthill-McKee sequence is reversed at the end.
Permutation rcm(const CsrLower& m);

/// H_P(i, j) = H(pi(i), pi(j)), stored as a new lower-triangular matrix.
CsrLower permute(const CsrLower& m, const Permutation& p);

std::vector<double> permute_vector(std::span<const double> v, const Permutation& p);
std::vector<double> unpermute_vector(std::span<const double> v, const Permutation& p);

/// Structure of the Cholesky factor: H's lower pattern plus fill, all values zero.
CsrLower symbolic_cholesky(const CsrLower& h);

/// Column-by-column Cholesky-Crout factorization into a factor whose pattern came from
/// symbolic_cholesky(h). Rows of each column may be split across `workers`; every entry is
/// computed by one worker with a fixed summation order.
void cholesky_crout(const CsrLower& h, CsrLower& l, unsigned workers = 1);
CsrLower cholesky_crout(const CsrLower& h, unsigned workers = 1);

/// Solves L y = b.
std::vector<double> solve_lower(const CsrLower& l, std::span<const double> b);
/// Solves L^T x = y.
std::vector<double> solve_upper_transposed(const CsrLower& l, std::span<const double> y);

}  // namespace tofslam
