#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace rrmesh {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted column indices and no duplicates.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols);

  /// Duplicates are summed in the order they appear in `entries`, so the
  /// result depends only on the triplet sequence.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                 std::span<const Triplet> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const int> row_ptr() const noexcept { return row_ptr_; }
  std::span<const int> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Entry (r, c), zero when not stored.
  double at(std::size_t r, std::size_t c) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  CsrMatrix transpose() const;
  double frobenius_norm() const;
  /// Largest absolute row sum.
  double norm_inf() const;

  bool operator==(const CsrMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// max |M - M^T| entry.
double symmetry_residual(const CsrMatrix& m);
/// max |M + M^T| entry.
double antisymmetry_residual(const CsrMatrix& m);

/// Matrix Market coordinate real general, 1-based indices.
void write_matrix_market(std::ostream& out, const CsrMatrix& m);

}  // namespace rrmesh
