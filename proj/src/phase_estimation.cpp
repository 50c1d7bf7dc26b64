#include "qgap/phase_estimation.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qgap {

namespace {

double cos2(double x) {
  const double c = std::cos(x);
  return c * c;
}

void check_state(const SparseHermitian& h, const CVector& state) {
  if (static_cast<std::size_t>(state.size()) != h.dim())
    throw std::invalid_argument("phase estimation: state dimension " + std::to_string(state.size()) +
                                " does not match H dimension " + std::to_string(h.dim()));
  if (std::abs(state.norm() - 1.0) > 1e-10) throw std::invalid_argument("phase estimation: state is not unit norm");
}

}  // namespace

PhaseEstPlan choose_time(const SparseHermitian& h) {
  if (h.dim() == 0) throw std::invalid_argument("choose_time: empty matrix");
  PhaseEstPlan p;
  p.row_sparsity = h.row_sparsity();
  p.max_entry = h.max_abs_entry();
  p.norm_bound = static_cast<double>(p.row_sparsity) * p.max_entry;
  if (p.norm_bound == 0.0) throw std::invalid_argument("choose_time: H = 0 has no Gershgorin scale; t unbounded");
  p.t = std::numbers::pi / (2.0 * p.norm_bound);
  return p;
}

double one_bit_pe_accept_unitary(const CMatrix& u, const CVector& state) {
  const Eigen::Index d = u.rows();
  if (u.cols() != d || state.size() != d) throw std::invalid_argument("one_bit_pe_accept: dimension mismatch");
  // ancilla is the most significant qubit
  CVector psi = CVector::Zero(2 * d);
  psi.head(d) = state;
  const double r = 1.0 / std::sqrt(2.0);
  auto hadamard = [&](CVector& v) {
    CVector top = v.head(d), bottom = v.tail(d);
    v.head(d) = r * (top + bottom);
    v.tail(d) = r * (top - bottom);
  };
  hadamard(psi);
  psi.tail(d) = u * psi.tail(d);
  hadamard(psi);
  return psi.head(d).squaredNorm();
}

double one_bit_pe_accept(const SparseHermitian& h, double t, const CVector& state, PeMode mode) {
  check_state(h, state);
  const CMatrix hd = h.to_dense();
  if (mode == PeMode::circuit) return one_bit_pe_accept_unitary(unitary_exp(hd, t), state);
  const EigenPairs ep = hermitian_eigen(hd);
  double p = 0.0;
  for (Eigen::Index i = 0; i < ep.values.size(); ++i) {
    const double w = std::norm(ep.vectors.col(i).dot(state));
    p += w * (1.0 + std::cos(ep.values(i) * t)) / 2.0;
  }
  return p;
}

double pe_gap_bound(double e0, double e1, double t) {
  if (!(e0 >= 0.0 && e0 <= e1 && t >= 0.0 && e1 * t < std::numbers::pi / 2))
    throw std::invalid_argument("pe_gap_bound: need 0 <= e0 <= e1 and e1 t < pi/2");
  const double x = t * (e1 - e0);
  return x * x / 2.0 - x * x * x / 6.0;
}

double convex_energy_bound(const std::vector<double>& probs, const std::vector<double>& energies, double mean_energy,
                           double t) {
  if (probs.size() != energies.size() || probs.empty())
    throw std::invalid_argument("convex_energy_bound: probs and energies must be nonempty and of equal length");
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("convex_energy_bound: probs do not sum to 1");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (i > 0 && energies[i] < energies[i - 1])
      throw std::invalid_argument("convex_energy_bound: energies must be nondecreasing");
    const double et = energies[i] * t;
    if (et < -1e-12 || et > std::numbers::pi / 2 + 1e-12)
      throw std::invalid_argument("convex_energy_bound: E t outside [0, pi/2]");
  }
  const double e1 = energies.front(), emax = energies.back();
  if (emax == e1) return cos2(e1 * t / 2.0);
  const double x = (mean_energy - e1) / (emax - e1);
  return cos2(e1 * t / 2.0) * (1.0 - x) + cos2(emax * t / 2.0) * x;
}

double min_accept_gap(double delta, double f_n) {
  if (!(delta >= 0.0 && f_n > 0.0)) throw std::invalid_argument("min_accept_gap: need delta >= 0 and f_n > 0");
  if (delta > f_n) throw std::invalid_argument("min_accept_gap: delta exceeds f_n");
  return 5.0 * delta * delta / (36.0 * f_n);
}

double witness_energy_slack(double a_val, double b_val, double f_n) {
  const double g = b_val - a_val;
  return 5.0 * g * g * g / (24.0 * f_n * f_n);
}

double witness_accept_margin(double a_val, double b_val, double f_n) {
  const double g = b_val - a_val;
  return 5.0 * g * g / (24.0 * f_n * f_n);
}

DecisionOutcome gs_description_verify(const SparseHermitian& h, const VerifierCircuit& witness_circuit, double a_val,
                                      double b_val, double f_n, bool gapped) {
  if (!(b_val > a_val)) throw std::invalid_argument("gs_description_verify: need b > a");
  const std::size_t dim = h.dim();
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(dim))));
  if (dim == 0 || (std::size_t{1} << n) != dim) throw std::invalid_argument("gs_description_verify: H dimension must be 2^n");
  const CMatrix hd = h.to_dense();
  const RVector e = hermitian_eigenvalues(hd);
  const double hn = std::max(std::abs(e(0)), std::abs(e(e.size() - 1)));
  if (f_n < hn - 1e-12)
    throw std::invalid_argument("gs_description_verify: f_n = " + std::to_string(f_n) + " is below ||H|| = " +
                                std::to_string(hn));
  if (e(0) < -1e-12) throw std::invalid_argument("gs_description_verify: H must be positive semidefinite");
  if (witness_circuit.qubits() != n)
    throw std::invalid_argument("gs_description_verify: witness circuit acts on " +
                                std::to_string(witness_circuit.qubits()) + " qubits, H on " + std::to_string(n));

  DecisionOutcome out;
  const double mean_diag = hd.trace().real() / static_cast<double>(dim);
  if (mean_diag <= b_val || f_n <= b_val) {
    const bool zero_witness = witness_circuit.gates.empty();
    out.verdict = (!gapped || zero_witness) ? Verdict::yes : Verdict::no;
    out.statistic = mean_diag;
    out.lower = b_val;
    out.upper = b_val;
    out.detail = gapped && !zero_witness ? "trivial branch: nonzero witness rejected" : "trivial branch";
    return out;
  }

  const double t = 1.0 / f_n;
  CVector zero = CVector::Zero(dim);
  zero[0] = 1.0;
  const CVector psi = apply_circuit(witness_circuit, zero);
  const double p = one_bit_pe_accept(h, t, psi, PeMode::circuit);
  const double no_upper = cos2(b_val * t / 2.0);
  const double yes_lower = no_upper + witness_accept_margin(a_val, b_val, f_n);
  out.statistic = p;
  out.lower = no_upper;
  out.upper = yes_lower;
  out.verdict = p >= 0.5 * (no_upper + yes_lower) ? Verdict::yes : Verdict::no;
  out.detail = "t=1/f_n";
  return out;
}

VerifierCircuit state_preparation_circuit(const CVector& psi) {
  const Eigen::Index d = psi.size();
  if (d != 2 && d != 4) throw std::invalid_argument("state_preparation_circuit: only 1 or 2 qubits supported");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw std::invalid_argument("state_preparation_circuit: state is not unit norm");
  CMatrix basis = CMatrix::Identity(d, d);
  basis.col(0) = psi;
  // Householder Q has first column psi up to a phase
  Eigen::HouseholderQR<CMatrix> qr(basis);
  CMatrix q = qr.householderQ();
  const cplx phase = psi.dot(q.col(0));
  q.col(0) *= std::conj(phase);
  VerifierCircuit c;
  c.m = d == 2 ? 1 : 2;
  c.w = 0;
  c.decision = 0;
  std::vector<int> targets;
  for (int i = 0; i < c.m; ++i) targets.push_back(i);
  c.gates.push_back(make_gate("PREP", q, targets));
  return c;
}

std::vector<double> witness_accept_probs(const SparseHermitian& h, const std::vector<VerifierCircuit>& witnesses,
                                         double f_n) {
  if (!(f_n > 0.0)) throw std::invalid_argument("witness_accept_probs: f_n must be positive");
  std::vector<double> out;
  CVector zero = CVector::Zero(h.dim());
  zero[0] = 1.0;
  for (const VerifierCircuit& c : witnesses) {
    if ((std::size_t{1} << c.qubits()) != h.dim())
      throw std::invalid_argument("witness_accept_probs: witness circuit size does not match H");
    out.push_back(one_bit_pe_accept(h, 1.0 / f_n, apply_circuit(c, zero), PeMode::circuit));
  }
  return out;
}

std::string accept_table_csv(const std::vector<double>& probs) {
  std::ostringstream os;
  os << "witness_index,accept_prob\n" << std::setprecision(17);
  for (std::size_t i = 0; i < probs.size(); ++i) os << i << ',' << probs[i] << '\n';
  return os.str();
}

}  // namespace qgap
