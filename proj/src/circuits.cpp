#include "qgap/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qgap {

namespace {

CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

std::size_t dim_of(int qubits) { return std::size_t{1} << qubits; }

void check_cap(int qubits, int cap, const char* who) {
  if (qubits > cap)
    throw std::invalid_argument(std::string(who) + ": register of " + std::to_string(qubits) +
                                " qubits (dimension 2^" + std::to_string(qubits) + ") exceeds cap of " +
                                std::to_string(cap) + " qubits");
}

}  // namespace

GateOp make_gate(std::string label, CMatrix matrix, std::vector<int> targets) {
  if (targets.empty() || targets.size() > 2) throw std::invalid_argument("gate " + label + ": needs 1 or 2 targets");
  const Eigen::Index want = Eigen::Index{1} << targets.size();
  if (matrix.rows() != want || matrix.cols() != want)
    throw std::invalid_argument("gate " + label + ": matrix size does not match target count");
  if (targets.size() == 2 && targets[0] == targets[1])
    throw std::invalid_argument("gate " + label + ": targets must be distinct");
  for (int q : targets)
    if (q < 0) throw std::invalid_argument("gate " + label + ": negative target");
  if (unitarity_defect(matrix) > 1e-12) throw std::invalid_argument("gate " + label + ": matrix is not unitary");
  return {std::move(label), std::move(matrix), std::move(targets)};
}

namespace gates {
CMatrix h() {
  const double r = 1.0 / std::sqrt(2.0);
  return mat2(r, r, r, -r);
}
CMatrix x() { return mat2(0, 1, 1, 0); }
CMatrix z() { return mat2(1, 0, 0, -1); }
CMatrix s() { return mat2(1, 0, 0, cplx(0, 1)); }
CMatrix t() { return mat2(1, 0, 0, std::polar(1.0, std::numbers::pi / 4)); }
CMatrix tdg() { return mat2(1, 0, 0, std::polar(1.0, -std::numbers::pi / 4)); }
CMatrix ry(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return mat2(c, -s, s, c);
}
CMatrix controlled(const CMatrix& u) {
  CMatrix m = CMatrix::Identity(4, 4);
  m.block(2, 2, 2, 2) = u;
  return m;
}
CMatrix cnot() { return controlled(x()); }
CMatrix cz() { return controlled(z()); }
CMatrix cphase(double phi) { return controlled(mat2(1, 0, 0, std::polar(1.0, phi))); }
}  // namespace gates

GateOp H(int q) { return make_gate("H", gates::h(), {q}); }
GateOp X(int q) { return make_gate("X", gates::x(), {q}); }
GateOp Z(int q) { return make_gate("Z", gates::z(), {q}); }
GateOp S(int q) { return make_gate("S", gates::s(), {q}); }
GateOp T(int q) { return make_gate("T", gates::t(), {q}); }
GateOp Tdg(int q) { return make_gate("TDG", gates::tdg(), {q}); }
GateOp Ry(int q, double theta) { return make_gate("RY", gates::ry(theta), {q}); }
GateOp CNOT(int control, int target) { return make_gate("CNOT", gates::cnot(), {control, target}); }
GateOp CZ(int a, int b) { return make_gate("CZ", gates::cz(), {a, b}); }
GateOp CPhase(int a, int b, double phi) { return make_gate("CPHASE", gates::cphase(phi), {a, b}); }
GateOp Controlled(int control, int target, const CMatrix& u, std::string label) {
  return make_gate(std::move(label), gates::controlled(u), {control, target});
}

void VerifierCircuit::validate(int qubit_cap) const {
  if (m < 0 || w < 0) throw std::invalid_argument("circuit: negative register size");
  if (m + w < 1) throw std::invalid_argument("circuit: empty register");
  check_cap(m + w, qubit_cap, "circuit");
  if (decision < 0 || decision >= m + w)
    throw std::invalid_argument("circuit: decision qubit " + std::to_string(decision) + " outside register");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    for (int q : g.targets)
      if (q < 0 || q >= m + w)
        throw std::invalid_argument("circuit: gate " + std::to_string(i) + " (" + g.label + ") targets qubit " +
                                    std::to_string(q) + " outside register");
    if (g.targets.size() == 2 && g.targets[0] == g.targets[1])
      throw std::invalid_argument("circuit: gate " + std::to_string(i) + " has repeated targets");
  }
}

void PromiseParams::validate() const {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("promise: c must lie in (0,1]");
  if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("promise: s must lie in [0,1)");
  if (!(c > s)) throw std::invalid_argument("promise: need c > s");
  if (!(g1 >= 0.0 && g1 <= 1.0 && g2 >= 0.0 && g2 <= 1.0))
    throw std::invalid_argument("promise: gaps must lie in [0,1]");
  if (w < 0) throw std::invalid_argument("promise: negative witness size");
}

void append_toffoli(std::vector<GateOp>& g, int a, int b, int c) {
  g.push_back(H(c));
  g.push_back(CNOT(b, c));
  g.push_back(Tdg(c));
  g.push_back(CNOT(a, c));
  g.push_back(T(c));
  g.push_back(CNOT(b, c));
  g.push_back(Tdg(c));
  g.push_back(CNOT(a, c));
  g.push_back(T(b));
  g.push_back(T(c));
  g.push_back(H(c));
  g.push_back(CNOT(a, b));
  g.push_back(T(a));
  g.push_back(Tdg(b));
  g.push_back(CNOT(a, b));
}

void append_mcx(std::vector<GateOp>& g, const std::vector<int>& controls, int target,
                const std::vector<int>& ancillas) {
  const std::size_t k = controls.size();
  if (k == 0) {
    g.push_back(X(target));
    return;
  }
  if (k == 1) {
    g.push_back(CNOT(controls[0], target));
    return;
  }
  if (k == 2) {
    append_toffoli(g, controls[0], controls[1], target);
    return;
  }
  if (ancillas.size() < k - 2) throw std::invalid_argument("append_mcx: not enough ancillas");
  append_toffoli(g, controls[0], controls[1], ancillas[0]);
  for (std::size_t i = 2; i + 1 < k; ++i) append_toffoli(g, ancillas[i - 2], controls[i], ancillas[i - 1]);
  append_toffoli(g, ancillas[k - 3], controls[k - 1], target);
  for (int i = static_cast<int>(k) - 2; i >= 2; --i) append_toffoli(g, ancillas[i - 2], controls[i], ancillas[i - 1]);
  append_toffoli(g, controls[0], controls[1], ancillas[0]);
}

void apply_gate(const GateOp& g, CVector& psi, int n) {
  const std::size_t dim = dim_of(n);
  if (static_cast<std::size_t>(psi.size()) != dim) throw std::invalid_argument("apply_gate: dimension mismatch");
  const CMatrix& u = g.matrix;
  if (g.targets.size() == 1) {
    const std::size_t mask = std::size_t{1} << (n - 1 - g.targets[0]);
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & mask) continue;
      const cplx a = psi[i], b = psi[i | mask];
      psi[i] = u00 * a + u01 * b;
      psi[i | mask] = u10 * a + u11 * b;
    }
    return;
  }
  const std::size_t ma = std::size_t{1} << (n - 1 - g.targets[0]);
  const std::size_t mb = std::size_t{1} << (n - 1 - g.targets[1]);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & (ma | mb)) continue;
    const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};
    cplx in[4], out[4];
    for (int r = 0; r < 4; ++r) in[r] = psi[idx[r]];
    for (int r = 0; r < 4; ++r) {
      out[r] = 0.0;
      for (int c = 0; c < 4; ++c) out[r] += u(r, c) * in[c];
    }
    for (int r = 0; r < 4; ++r) psi[idx[r]] = out[r];
  }
}

CVector apply_circuit(const VerifierCircuit& circuit, const CVector& state) {
  circuit.validate(std::max(kDefaultQubitCap, circuit.qubits()));
  if (static_cast<std::size_t>(state.size()) != dim_of(circuit.qubits()))
    throw std::invalid_argument("apply_circuit: state dimension " + std::to_string(state.size()) +
                                " does not match 2^" + std::to_string(circuit.qubits()));
  if (std::abs(state.norm() - 1.0) > 1e-10) throw std::invalid_argument("apply_circuit: state is not unit norm");
  CVector psi = state;
  for (const auto& g : circuit.gates) apply_gate(g, psi, circuit.qubits());
  return psi;
}

namespace {

// Columns: U|0^m, j> for every witness basis index j.
CMatrix witness_images(const VerifierCircuit& circuit) {
  const int n = circuit.qubits();
  const std::size_t dim = dim_of(n), wdim = dim_of(circuit.w);
  CMatrix psi(dim, wdim);
  for (std::size_t j = 0; j < wdim; ++j) {
    CVector v = CVector::Zero(dim);
    v[j] = 1.0;
    for (const auto& g : circuit.gates) apply_gate(g, v, n);
    psi.col(j) = v;
  }
  return psi;
}

double decision_weight(const VerifierCircuit& circuit, const CVector& v) {
  const int n = circuit.qubits();
  const std::size_t mask = std::size_t{1} << (n - 1 - circuit.decision);
  double p = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (static_cast<std::size_t>(i) & mask) p += std::norm(v[i]);
  return p;
}

}  // namespace

double accept_probability(const VerifierCircuit& circuit, const CVector& witness, int qubit_cap) {
  circuit.validate(qubit_cap);
  if (static_cast<std::size_t>(witness.size()) != dim_of(circuit.w))
    throw std::invalid_argument("accept_probability: witness dimension mismatch");
  CVector v = CVector::Zero(dim_of(circuit.qubits()));
  v.head(witness.size()) = witness;
  return decision_weight(circuit, apply_circuit(circuit, v));
}

AcceptOperator make_accept_operator(const CMatrix& q) {
  if (hermiticity_defect(q) > 1e-12) throw std::invalid_argument("accept operator is not Hermitian");
  AcceptOperator a;
  a.q = q;
  EigenPairs ep = hermitian_eigen(q);
  const Eigen::Index d = ep.values.size();
  a.eigenvalues = ep.values.reverse();
  a.eigenvectors = ep.vectors.rowwise().reverse();
  if (d > 0 && (a.eigenvalues(d - 1) < -1e-10 || a.eigenvalues(0) > 1.0 + 1e-10))
    throw std::domain_error("accept operator eigenvalues leave [0,1]");
  return a;
}

AcceptOperator accept_operator(const VerifierCircuit& circuit, int qubit_cap) {
  circuit.validate(qubit_cap);
  const int n = circuit.qubits();
  CMatrix psi = witness_images(circuit);
  const std::size_t mask = std::size_t{1} << (n - 1 - circuit.decision);
  for (Eigen::Index i = 0; i < psi.rows(); ++i)
    if (!(static_cast<std::size_t>(i) & mask)) psi.row(i).setZero();
  CMatrix q = psi.adjoint() * psi;
  q = (q + q.adjoint()) * 0.5;
  return make_accept_operator(q);
}

namespace {

GateOp remapped(const GateOp& g, auto&& map) {
  GateOp out = g;
  for (int& q : out.targets) q = map(q);
  return out;
}

}  // namespace

VerifierCircuit classical_witness_extend(const VerifierCircuit& circuit) {
  circuit.validate(std::max(kDefaultQubitCap, circuit.qubits()));
  const int m = circuit.m, w = circuit.w;
  VerifierCircuit out;
  out.m = m + w;
  out.w = w;
  auto map = [&](int q) { return q < m ? q : q + w; };
  out.decision = map(circuit.decision);
  for (int j = 0; j < w; ++j) out.gates.push_back(CNOT(m + w + j, m + j));
  for (const auto& g : circuit.gates) out.gates.push_back(remapped(g, map));
  return out;
}

VerifierCircuit flag_qubit_transform(const VerifierCircuit& circuit, const PromiseParams& params, int poly_factor) {
  params.validate();
  if (poly_factor < 2) throw std::invalid_argument("flag_qubit_transform: poly_factor must be >= 2");
  circuit.validate(std::max(kDefaultQubitCap, circuit.qubits()));
  const int m = circuit.m, w = circuit.w;
  const int coin = m, r = m + 1, flagcopy = m + 2, dnew = m + 3;
  const int chain0 = m + 4;
  const int chain = std::max(0, w);  // (w + 2 controls) - 2
  const int m_new = m + 4 + chain;
  const int flag = m_new;
  auto map = [&](int q) { return q < m ? q : m_new + 1 + (q - m); };

  VerifierCircuit out;
  out.m = m_new;
  out.w = w + 1;
  out.decision = dnew;
  const double p = params.s + (params.c - params.s) / poly_factor;
  out.gates.push_back(Ry(coin, 2.0 * std::asin(std::sqrt(p))));
  std::vector<int> controls{flag};
  for (int j = 0; j < w; ++j) controls.push_back(m_new + 1 + j);
  controls.push_back(coin);
  std::vector<int> anc;
  for (int i = 0; i < chain; ++i) anc.push_back(chain0 + i);
  append_mcx(out.gates, controls, r, anc);
  out.gates.push_back(CNOT(flag, flagcopy));
  for (const auto& g : circuit.gates) out.gates.push_back(remapped(g, map));
  out.gates.push_back(X(flag));
  append_toffoli(out.gates, flag, map(circuit.decision), dnew);
  out.gates.push_back(X(flag));
  out.gates.push_back(CNOT(r, dnew));
  return out;
}

int min_reject_exponent(const VerifierCircuit& circuit, const PromiseParams& params) {
  params.validate();
  return circuit.T() + circuit.w + static_cast<int>(std::ceil(std::log2(1.0 / (params.c - params.s)) - 1e-12));
}

VerifierCircuit distinct_prob_transform(const VerifierCircuit& circuit, const PromiseParams& params,
                                        int reject_exponent) {
  circuit.validate(std::max(kDefaultQubitCap, circuit.qubits()));
  const int need = min_reject_exponent(circuit, params);
  if (reject_exponent < need)
    throw std::invalid_argument("distinct_prob_transform: reject_exponent " + std::to_string(reject_exponent) +
                                " below required minimum " + std::to_string(need));
  if (reject_exponent > 60) throw std::invalid_argument("distinct_prob_transform: reject_exponent above 60");
  const int m = circuit.m, w = circuit.w;
  const int coin = m, dnew = m + 1, hit = m + 2, chain0 = m + 3;
  const int chain = std::max(0, w - 2);
  const int m_new = m + 3 + chain;
  auto map = [&](int q) { return q < m ? q : m_new + (q - m); };

  VerifierCircuit out;
  out.m = m_new;
  out.w = w;
  out.decision = dnew;
  out.gates.push_back(X(coin));
  std::vector<int> controls, anc;
  for (int j = 0; j < w; ++j) controls.push_back(m_new + j);
  for (int i = 0; i < chain; ++i) anc.push_back(chain0 + i);
  const double scale = std::ldexp(1.0, -reject_exponent);
  for (std::size_t y = 1; y < dim_of(w); ++y) {
    std::vector<GateOp> flips;
    for (int j = 0; j < w; ++j)
      if (!((y >> (w - 1 - j)) & 1u)) flips.push_back(X(m_new + j));
    const double phi = 2.0 * std::acos(std::sqrt(1.0 - static_cast<double>(y) * scale));
    out.gates.insert(out.gates.end(), flips.begin(), flips.end());
    append_mcx(out.gates, controls, hit, anc);
    out.gates.push_back(Controlled(hit, coin, gates::ry(phi), "CRY"));
    append_mcx(out.gates, controls, hit, anc);
    out.gates.insert(out.gates.end(), flips.begin(), flips.end());
  }
  for (const auto& g : circuit.gates) out.gates.push_back(remapped(g, map));
  append_toffoli(out.gates, map(circuit.decision), coin, dnew);
  return out;
}

std::vector<QueryPair> uqcma_query_schedule(double c, double g1) {
  if (g1 == 0.0) throw std::invalid_argument("uqcma_query_schedule: g1 = 0 gives an unbounded schedule");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("uqcma_query_schedule: c must lie in (0,1)");
  if (!(g1 > 0.0 && g1 <= 1.0)) throw std::invalid_argument("uqcma_query_schedule: g1 must lie in (0,1]");
  const long jmax = static_cast<long>(std::floor(2.0 / ((1.0 - c) * g1) + 1e-9));
  std::vector<QueryPair> out;
  out.reserve(jmax + 1);
  for (long j = 0; j <= jmax; ++j) out.push_back({c + (j + 1) * g1 / 2.0, c + j * g1 / 2.0});
  return out;
}

}  // namespace qgap
