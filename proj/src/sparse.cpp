#include "rrmesh/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rrmesh/kernels.hpp"

namespace rrmesh {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::span<const Triplet> entries) {
  CsrMatrix m(rows, cols);
  std::vector<int> count(rows + 1, 0);
  for (const auto& t : entries) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= rows ||
        static_cast<std::size_t>(t.col) >= cols)
      throw std::out_of_range("triplet index outside matrix");
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());

  // Bucket by row keeping the input order, then stable-sort each row by column.
  std::vector<std::size_t> order(entries.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (std::size_t i = 0; i < entries.size(); ++i) order[fill[entries[i].row]++] = i;

  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const auto first = order.begin() + count[r];
    const auto last = order.begin() + count[r + 1];
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
      return entries[a].col < entries[b].col;
    });
    for (auto it = first; it != last; ++it) {
      const Triplet& t = entries[*it];
      if (static_cast<std::size_t>(m.col_idx_.size()) > static_cast<std::size_t>(m.row_ptr_[r]) &&
          m.col_idx_.back() == t.col) {
        m.values_.back() += t.value;
      } else {
        m.col_idx_.push_back(t.col);
        m.values_.push_back(t.value);
      }
    }
    m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = col_idx_.begin() + row_ptr_[r];
  const auto last = col_idx_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, static_cast<int>(c));
  return (it != last && *it == static_cast<int>(c)) ? values_[it - col_idx_.begin()] : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw std::invalid_argument("spmv: size mismatch");
  kernels::spmv(row_ptr_, col_idx_, values_, x, y);
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      t.push_back({col_idx_[k], static_cast<int>(r), values_[k]});
  return from_triplets(cols_, rows_, t);
}

double CsrMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double CsrMatrix::norm_inf() const {
  double m = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

namespace {

double residual(const CsrMatrix& m, double sign) {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
      const std::size_t c = m.col_idx()[k];
      worst = std::max(worst, std::abs(m.values()[k] + sign * m.at(c, r)));
    }
  return worst;
}

}  // namespace

// Every stored entry is compared with its mirror; entries present only on
// one side are caught when that side is visited.
double symmetry_residual(const CsrMatrix& m) { return residual(m, -1.0); }
double antisymmetry_residual(const CsrMatrix& m) { return residual(m, 1.0); }

void write_matrix_market(std::ostream& out, const CsrMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", m.values()[k]);
      out << r + 1 << ' ' << m.col_idx()[k] + 1 << ' ' << buf << '\n';
    }
}

}  // namespace rrmesh
