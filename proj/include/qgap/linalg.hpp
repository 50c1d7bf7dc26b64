#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace qgap {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

struct EigenPairs {
  RVector values;  // ascending
  CMatrix vectors;
};

EigenPairs hermitian_eigen(const CMatrix& h);
RVector hermitian_eigenvalues(const CMatrix& h);

double unitarity_defect(const CMatrix& u);
double hermiticity_defect(const CMatrix& h);
double max_abs(const CMatrix& m);
double operator_norm(const CMatrix& m);
double trace_norm(const CMatrix& m);
CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix unitary_exp(const CMatrix& h, double t);  // exp(-i h t)

struct SparseEntry {
  std::size_t col;
  cplx value;
};

// Row-compressed Hermitian matrix with entry-oracle access.
class SparseHermitian {
 public:
  SparseHermitian() = default;
  explicit SparseHermitian(std::size_t dim);

  static SparseHermitian from_dense(const CMatrix& m, double drop = 0.0);

  void add(std::size_t row, std::size_t col, cplx value);
  void finalize();

  std::size_t dim() const { return rows_.size(); }
  const std::vector<SparseEntry>& row(std::size_t i) const { return rows_.at(i); }
  cplx entry(std::size_t i, std::size_t j) const;
  std::size_t row_sparsity() const;
  double max_abs_entry() const;
  std::size_t nonzeros() const;
  CMatrix to_dense() const;
  bool is_real() const;

  void write_coo(std::ostream& os) const;
  static SparseHermitian read_coo(std::istream& is);

 private:
  std::vector<std::vector<SparseEntry>> rows_;
};

}  // namespace qgap
