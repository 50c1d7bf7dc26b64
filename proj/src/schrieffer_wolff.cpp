#include "qgap/schrieffer_wolff.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qgap {

PerturbationSplit make_split(const CMatrix& h0, const CMatrix& h1, double degeneracy_tol) {
  if (h0.rows() != h0.cols() || h1.rows() != h0.rows() || h1.cols() != h0.cols())
    throw std::invalid_argument("make_split: h0 and h1 must be square and of equal size");
  if (hermiticity_defect(h0) > 1e-12 || hermiticity_defect(h1) > 1e-12)
    throw std::invalid_argument("make_split: h0 and h1 must be Hermitian");
  EigenPairs ep = hermitian_eigen(h0);
  const Eigen::Index n = ep.values.size();
  Eigen::Index r = 1;
  while (r < n && ep.values(r) - ep.values(0) <= degeneracy_tol) ++r;
  if (r == n) throw std::invalid_argument("make_split: h0 has no excited states");
  PerturbationSplit s;
  s.h0 = h0;
  s.h1 = h1;
  s.lambda0 = ep.values(0);
  s.delta = ep.values(r) - ep.values(0);
  s.ground_basis = ep.vectors.leftCols(r);
  s.excited_basis = ep.vectors.rightCols(n - r);
  s.excited_energies = ep.values.tail(n - r);
  s.p0 = s.ground_basis * s.ground_basis.adjoint();
  s.h1_norm = operator_norm(h1);
  if (!(s.h1_norm < s.delta / 2.0))
    throw std::invalid_argument("make_split: ||h1|| = " + std::to_string(s.h1_norm) + " is not below delta/2 = " +
                                std::to_string(s.delta / 2.0));
  return s;
}

CMatrix low_energy_projector(const PerturbationSplit& s) {
  EigenPairs ep = hermitian_eigen(s.h0 + s.h1);
  const double lo = s.lambda0 - s.delta / 2.0, hi = s.lambda0 + s.delta / 2.0;
  const Eigen::Index n = ep.values.size();
  CMatrix p = CMatrix::Zero(n, n);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = ep.values(i);
    if (std::abs(e - lo) < 1e-9 || std::abs(e - hi) < 1e-9)
      throw std::domain_error("low_energy_projector: eigenvalue " + std::to_string(e) +
                              " within 1e-9 of the window edge; ill-conditioned split");
    if (e > lo && e < hi) {
      p += ep.vectors.col(i) * ep.vectors.col(i).adjoint();
      ++rank;
    }
  }
  if (rank != s.ground_basis.cols())
    throw std::domain_error("low_energy_projector: rank " + std::to_string(rank) + " differs from rank(P0) " +
                            std::to_string(s.ground_basis.cols()));
  return p;
}

CMatrix sw_unitary(const CMatrix& p0, const CMatrix& p) {
  if (p0.rows() != p.rows() || p0.cols() != p.cols()) throw std::invalid_argument("sw_unitary: size mismatch");
  const double dist = operator_norm(p - p0);
  if (!(dist < 1.0))
    throw std::invalid_argument("sw_unitary: ||P - P0|| = " + std::to_string(dist) + " is not below 1");
  const Eigen::Index n = p.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix m = (2.0 * p0 - id) * (2.0 * p - id);
  CMatrix u = m.sqrt();
  return u;
}

EffectiveHamiltonian effective_hamiltonian(const PerturbationSplit& s, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("effective_hamiltonian: order must be 0, 1 or 2");
  if (s.h1_norm > s.delta / 16.0 * (1.0 + 1e-12))
    throw std::invalid_argument("effective_hamiltonian: ||h1||/delta = " + std::to_string(s.h1_norm / s.delta) +
                                " exceeds 1/16");
  const CMatrix& g = s.ground_basis;
  const Eigen::Index r = g.cols();
  EffectiveHamiltonian out;
  out.matrix = g.adjoint() * s.h0 * g;
  if (order >= 1) out.matrix += g.adjoint() * s.h1 * g;
  if (order >= 2) {
    const CMatrix v = s.excited_basis.adjoint() * s.h1 * g;  // <k|H1|i>
    CMatrix second = CMatrix::Zero(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j) {
        cplx acc = 0.0;
        for (Eigen::Index k = 0; k < v.rows(); ++k) {
          acc += std::conj(v(k, i)) * v(k, j) / (s.lambda0 - s.excited_energies(k));
        }
        second(i, j) = acc;
      }
    out.matrix += second;
  }
  out.matrix = (out.matrix + out.matrix.adjoint()) * 0.5;
  out.eigenvalues = hermitian_eigenvalues(out.matrix);
  return out;
}

double truncation_error_bound(double epsilon, double delta, double constant) {
  if (!(delta > 0.0)) throw std::invalid_argument("truncation_error_bound: delta must be positive");
  return constant * epsilon * epsilon / delta;
}

}  // namespace qgap
