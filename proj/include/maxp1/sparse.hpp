#pragma once

// Compressed-row sparse matrices and the diagonal operators of the lumped
// scheme. Assembly goes through a coordinate list that is stable-sorted and
// compressed, so identical meshes produce bitwise-identical operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxp1 {

struct Triplet {
  int row;
  int col;
  double value;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Build CSR from a coordinate list; duplicates are summed in list order.
  static SparseMatrix from_coo(int nrows, int ncols, std::vector<Triplet> coo) {
    std::stable_sort(coo.begin(), coo.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix A;
    A.nrows_ = nrows;
    A.ncols_ = ncols;
    A.row_offsets_.assign(static_cast<std::size_t>(nrows) + 1, 0);
    std::size_t i = 0;
    while (i < coo.size()) {
      const int row = coo[i].row;
      const int col = coo[i].col;
      if (row < 0 || row >= nrows || col < 0 || col >= ncols)
        throw std::out_of_range("SparseMatrix::from_coo: entry out of range");
      double sum = 0.0;
      while (i < coo.size() && coo[i].row == row && coo[i].col == col) sum += coo[i++].value;
      A.col_indices_.push_back(col);
      A.values_.push_back(sum);
      ++A.row_offsets_[static_cast<std::size_t>(row) + 1];
    }
    for (int r = 0; r < nrows; ++r) A.row_offsets_[r + 1] += A.row_offsets_[r];
    return A;
  }

  int rows() const { return nrows_; }
  int cols() const { return ncols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(int row, int col) const {
    for (int i = row_offsets_[row]; i < row_offsets_[row + 1]; ++i)
      if (col_indices_[i] == col) return values_[i];
    return 0.0;
  }

  /// y = A x, deterministic left-to-right summation within each row.
  void multiply(const double* x, double* y) const {
    for (int r = 0; r < nrows_; ++r) {
      double sum = 0.0;
      for (int i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i)
        sum += values_[i] * x[col_indices_[i]];
      y[r] = sum;
    }
    ++apply_count_;
  }

  /// Number of sparse products performed; the explicitness property test
  /// checks one step costs exactly one of these.
  std::uint64_t apply_count() const { return apply_count_; }
  void reset_apply_count() const { apply_count_ = 0; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// max |A - A^T| over all entries, for symmetry checks.
  double asymmetry() const {
    double m = 0.0;
    for (int r = 0; r < nrows_; ++r)
      for (int i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i)
        m = std::max(m, std::abs(values_[i] - coeff(col_indices_[i], r)));
    return m;
  }

  /// MatrixMarket coordinate dump for offline inspection.
  void write_matrix_market(const std::string& path) const {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_matrix_market: cannot open " + path);
    std::fprintf(fp, "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(fp, "%d %d %lld\n", nrows_, ncols_, static_cast<long long>(nnz()));
    for (int r = 0; r < nrows_; ++r)
      for (int i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i)
        std::fprintf(fp, "%d %d %.17g\n", r + 1, col_indices_[i] + 1, values_[i]);
    std::fclose(fp);
  }

 private:
  int nrows_ = 0;
  int ncols_ = 0;
  std::vector<int> row_offsets_;
  std::vector<int> col_indices_;
  std::vector<double> values_;
  mutable std::uint64_t apply_count_ = 0;
};

inline std::vector<double> spmv(const SparseMatrix& A, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != A.cols())
    throw std::invalid_argument("spmv: dimension mismatch");
  std::vector<double> y(A.rows());
  A.multiply(x.data(), y.data());
  return y;
}

struct DiagonalMatrix {
  std::vector<double> diag;

  int size() const { return static_cast<int>(diag.size()); }
  std::vector<double> apply(const std::vector<double>& x) const {
    if (x.size() != diag.size()) throw std::invalid_argument("DiagonalMatrix: dimension mismatch");
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = diag[i] * x[i];
    return y;
  }
};

}  // namespace maxp1
