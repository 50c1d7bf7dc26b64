#include "qgap/random_instances.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace qgap {

namespace {

CMatrix ginibre(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = n(rng);
      const double im = n(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

}  // namespace

CMatrix random_unitary(Rng& rng, int dim) {
  CMatrix g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

CVector random_state(Rng& rng, int dim) {
  CVector v = ginibre(rng, dim, 1).col(0);
  return v / v.norm();
}

CMatrix random_hermitian(Rng& rng, int dim, double scale) {
  CMatrix g = ginibre(rng, dim, dim);
  return (g + g.adjoint()) * (0.5 * scale);
}

VerifierCircuit random_circuit(Rng& rng, int m, int w, int gate_count) {
  VerifierCircuit c;
  c.m = m;
  c.w = w;
  c.decision = 0;
  const int n = m + w;
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::bernoulli_distribution two(n > 1 ? 0.5 : 0.0);
  for (int i = 0; i < gate_count; ++i) {
    if (two(rng)) {
      int a = pick(rng), b = pick(rng);
      while (b == a) b = pick(rng);
      c.gates.push_back(make_gate("U2", random_unitary(rng, 4), {a, b}));
    } else {
      c.gates.push_back(make_gate("U1", random_unitary(rng, 2), {pick(rng)}));
    }
  }
  return c;
}

VerifierCircuit random_dyadic_verifier(Rng& rng, int w) {
  if (w < 1) throw std::invalid_argument("random_dyadic_verifier: need w >= 1");
  // qubits: decision 0, coins 1..2, witness 3..3+w
  const int coins = 2;
  std::uniform_int_distribution<int> pick_w(0, w - 1);
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    VerifierCircuit c;
    c.m = 1 + coins;
    c.w = w;
    c.decision = 0;
    for (int k = 1; k <= coins; ++k) {
      if (coin(rng))
        c.gates.push_back(H(k));
      else
        c.gates.push_back(Controlled(c.m + pick_w(rng), k, gates::h(), "CH"));
    }
    if (coin(rng)) append_toffoli(c.gates, 1, 2, 0);
    for (int k = 1; k <= coins; ++k)
      if (coin(rng)) c.gates.push_back(CNOT(k, 0));
    for (int j = 0; j < w; ++j)
      if (coin(rng)) c.gates.push_back(CNOT(c.m + j, 0));
    if (coin(rng)) c.gates.push_back(X(0));
    AcceptOperator q = accept_operator(c);
    bool ok = true;
    for (Eigen::Index i = 0; i < q.q.rows(); ++i) ok = ok && q.q(i, i).real() > 1e-9;
    if (ok) return c;
  }
  throw std::domain_error("random_dyadic_verifier: no instance with nonzero probabilities found");
}

CMatrix random_gapped_hamiltonian(Rng& rng, int dim, double ground, double gap, double spread) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVector e(dim);
  e(0) = ground;
  for (int i = 1; i < dim; ++i) e(i) = ground + gap + spread * u(rng);
  CMatrix v = random_unitary(rng, dim);
  CMatrix h = v * e.cast<cplx>().asDiagonal() * v.adjoint();
  return (h + h.adjoint()) * 0.5;
}

}  // namespace qgap
