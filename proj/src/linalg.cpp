#include "qgap/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qgap {

EigenPairs hermitian_eigen(const CMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eigen: matrix is not square");
  if (h.rows() == 0) return {};
  CMatrix sym = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) throw std::domain_error("hermitian_eigen: solver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

RVector hermitian_eigenvalues(const CMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eigenvalues: matrix is not square");
  if (h.rows() == 0) return {};
  CMatrix sym = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::domain_error("hermitian_eigenvalues: solver did not converge");
  return es.eigenvalues();
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMatrix& u) {
  CMatrix d = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
  return max_abs(d);
}

double hermiticity_defect(const CMatrix& h) { return max_abs(h - h.adjoint()); }

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double trace_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix unitary_exp(const CMatrix& h, double t) {
  EigenPairs ep = hermitian_eigen(h);
  CVector phases(ep.values.size());
  for (Eigen::Index i = 0; i < ep.values.size(); ++i) phases(i) = std::exp(cplx(0.0, -ep.values(i) * t));
  return ep.vectors * phases.asDiagonal() * ep.vectors.adjoint();
}

SparseHermitian::SparseHermitian(std::size_t dim) : rows_(dim) {}

SparseHermitian SparseHermitian::from_dense(const CMatrix& m, double drop) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SparseHermitian: matrix is not square");
  if (hermiticity_defect(m) > 1e-12) throw std::invalid_argument("SparseHermitian: matrix is not Hermitian");
  SparseHermitian s(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > drop) s.rows_[i].push_back({static_cast<std::size_t>(j), m(i, j)});
  return s;
}

void SparseHermitian::add(std::size_t row, std::size_t col, cplx value) {
  if (row >= dim() || col >= dim()) throw std::invalid_argument("SparseHermitian::add: index out of range");
  rows_[row].push_back({col, value});
}

void SparseHermitian::finalize() {
  for (auto& r : rows_) {
    std::sort(r.begin(), r.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
    std::vector<SparseEntry> merged;
    for (const auto& e : r) {
      if (!merged.empty() && merged.back().col == e.col)
        merged.back().value += e.value;
      else
        merged.push_back(e);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const SparseEntry& e) { return e.value == cplx(0.0); }),
                 merged.end());
    r = std::move(merged);
  }
  for (std::size_t i = 0; i < dim(); ++i)
    for (const auto& e : rows_[i])
      if (std::abs(entry(e.col, i) - std::conj(e.value)) > 1e-12)
        throw std::invalid_argument("SparseHermitian: entries (" + std::to_string(i) + "," + std::to_string(e.col) +
                                    ") break Hermitian symmetry");
}

cplx SparseHermitian::entry(std::size_t i, std::size_t j) const {
  const auto& r = rows_.at(i);
  auto it = std::lower_bound(r.begin(), r.end(), j, [](const SparseEntry& e, std::size_t c) { return e.col < c; });
  if (it != r.end() && it->col == j) return it->value;
  return cplx(0.0);
}

std::size_t SparseHermitian::row_sparsity() const {
  std::size_t d = 0;
  for (const auto& r : rows_) d = std::max(d, r.size());
  return d;
}

double SparseHermitian::max_abs_entry() const {
  double k = 0.0;
  for (const auto& r : rows_)
    for (const auto& e : r) k = std::max(k, std::abs(e.value));
  return k;
}

std::size_t SparseHermitian::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

bool SparseHermitian::is_real() const {
  for (const auto& r : rows_)
    for (const auto& e : r)
      if (e.value.imag() != 0.0) return false;
  return true;
}

CMatrix SparseHermitian::to_dense() const {
  CMatrix m = CMatrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i)
    for (const auto& e : rows_[i]) m(i, e.col) = e.value;
  return m;
}

void SparseHermitian::write_coo(std::ostream& os) const {
  os << "dim=" << dim() << " fields=coo\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < dim(); ++i)
    for (const auto& e : rows_[i]) os << i << ' ' << e.col << ' ' << e.value.real() << ' ' << e.value.imag() << '\n';
}

SparseHermitian SparseHermitian::read_coo(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  long long dim = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::istringstream ss(line);
    std::string a, b;
    ss >> a >> b;
    if (a.rfind("dim=", 0) != 0 || b != "fields=coo")
      throw std::invalid_argument("coo line " + std::to_string(lineno) + ": expected header 'dim=<int> fields=coo'");
    try {
      dim = std::stoll(a.substr(4));
    } catch (const std::exception&) {
      dim = -1;
    }
    if (dim < 1) throw std::invalid_argument("coo line " + std::to_string(lineno) + ": bad dimension");
    break;
  }
  if (dim < 1) throw std::invalid_argument("coo: missing header");
  SparseHermitian s(static_cast<std::size_t>(dim));
  while (std::getline(is, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    long long r, c;
    double re, im;
    std::string extra;
    if (!(ss >> r >> c >> re >> im) || (ss >> extra))
      throw std::invalid_argument("coo line " + std::to_string(lineno) + ": expected 'row col re im'");
    if (r < 0 || c < 0 || r >= dim || c >= dim)
      throw std::invalid_argument("coo line " + std::to_string(lineno) + ": index out of range");
    s.add(static_cast<std::size_t>(r), static_cast<std::size_t>(c), cplx(re, im));
  }
  s.finalize();
  return s;
}

}  // namespace qgap
