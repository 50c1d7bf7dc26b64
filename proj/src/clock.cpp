#include "qgap/clock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgap {

namespace {

CMatrix gate_unitary(const GateOp& g, int n) {
  const std::size_t dim = std::size_t{1} << n;
  CMatrix u(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    CVector v = CVector::Zero(dim);
    v[j] = 1.0;
    apply_gate(g, v, n);
    u.col(j) = v;
  }
  return u;
}

CMatrix qubit_projector(int n, int q, int value) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = std::size_t{1} << (n - 1 - q);
  CMatrix p = CMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    if (((i & mask) != 0) == (value == 1)) p(i, i) = 1.0;
  return p;
}

// Clock qubits c_1..c_T; c_i is bit T-i of the clock index.
bool clock_bit(std::size_t idx, int T, int i) { return (idx >> (T - i)) & 1u; }

CMatrix clock_projector(ClockEncoding enc, int T, int t) {
  if (enc == ClockEncoding::ideal) {
    CMatrix p = CMatrix::Zero(T + 1, T + 1);
    p(t, t) = 1.0;
    return p;
  }
  const std::size_t dim = std::size_t{1} << T;
  CMatrix p = CMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    bool on;
    if (t == 0)
      on = !clock_bit(i, T, 1);
    else if (t == T)
      on = clock_bit(i, T, T);
    else
      on = clock_bit(i, T, t) && !clock_bit(i, T, t + 1);
    if (on) p(i, i) = 1.0;
  }
  return p;
}

// |t+1><t| restricted to the legal neighbourhood.
CMatrix clock_step(ClockEncoding enc, int T, int t) {
  if (enc == ClockEncoding::ideal) {
    CMatrix s = CMatrix::Zero(T + 1, T + 1);
    s(t + 1, t) = 1.0;
    return s;
  }
  const std::size_t dim = std::size_t{1} << T;
  CMatrix s = CMatrix::Zero(dim, dim);
  const int flip = t + 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (clock_bit(i, T, flip)) continue;
    if (t >= 1 && !clock_bit(i, T, t)) continue;
    if (t + 2 <= T && clock_bit(i, T, t + 2)) continue;
    s(i | (std::size_t{1} << (T - flip)), i) = 1.0;
  }
  return s;
}

}  // namespace

std::size_t ClockHamiltonian::kernel_dim() const {
  return mode == WitnessMode::no_witness ? 1 : (std::size_t{1} << w);
}

std::size_t clock_index(ClockEncoding enc, int T, int t) {
  if (t < 0 || t > T) throw std::invalid_argument("clock_index: time out of range");
  if (enc == ClockEncoding::ideal) return static_cast<std::size_t>(t);
  std::size_t idx = 0;
  for (int i = 1; i <= t; ++i) idx |= std::size_t{1} << (T - i);
  return idx;
}

ClockHamiltonian build_clock(const VerifierCircuit& circuit, double epsilon, ClockEncoding enc, WitnessMode mode,
                             std::size_t dim_cap) {
  circuit.validate(kDefaultQubitCap);
  if (!(epsilon >= 0.0)) throw std::invalid_argument("build_clock: epsilon must be >= 0");
  const int T = circuit.T();
  if (enc == ClockEncoding::unary && T == 0)
    throw std::invalid_argument("build_clock: unary-domain-wall encoding needs T >= 1");
  const int n = circuit.qubits();
  const std::size_t sys = std::size_t{1} << n;
  if (enc == ClockEncoding::unary && T > 20) throw std::invalid_argument("build_clock: clock too long for unary encoding");
  const std::size_t cdim = enc == ClockEncoding::ideal ? static_cast<std::size_t>(T + 1) : (std::size_t{1} << T);
  if (sys * cdim > dim_cap)
    throw std::invalid_argument("build_clock: dimension " + std::to_string(sys * cdim) + " exceeds cap " +
                                std::to_string(dim_cap));

  ClockHamiltonian h;
  h.epsilon = epsilon;
  h.T = T;
  h.encoding = enc;
  h.mode = mode;
  h.system_qubits = n;
  h.clock_dim = cdim;
  h.w = circuit.w;
  const std::size_t dim = sys * cdim;
  const CMatrix isys = CMatrix::Identity(sys, sys);

  CMatrix penalized = CMatrix::Zero(sys, sys);
  const int last = mode == WitnessMode::with_witness ? circuit.m : n;
  for (int q = 0; q < last; ++q) penalized += qubit_projector(n, q, 1);
  h.h_input = kron(penalized, clock_projector(enc, T, 0));

  h.h_prop = CMatrix::Zero(dim, dim);
  for (int t = 0; t < T; ++t) {
    const CMatrix u = gate_unitary(circuit.gates[t], n);
    const CMatrix fwd = kron(u, clock_step(enc, T, t));
    h.h_prop += kron(isys, clock_projector(enc, T, t) + clock_projector(enc, T, t + 1));
    h.h_prop -= fwd;
    h.h_prop -= fwd.adjoint();
  }

  h.h_output = epsilon * kron(qubit_projector(n, circuit.decision, 0), clock_projector(enc, T, T));

  h.h_clock = CMatrix::Zero(dim, dim);
  if (enc == ClockEncoding::unary) {
    CMatrix pen = CMatrix::Zero(cdim, cdim);
    for (std::size_t i = 0; i < cdim; ++i)
      for (int k = 1; k < T; ++k)
        if (!clock_bit(i, T, k) && clock_bit(i, T, k + 1)) pen(i, i) += 1.0;
    h.h_clock = kron(isys, pen);
  }
  return h;
}

HistoryState history_state(const VerifierCircuit& circuit, const CVector& witness, ClockEncoding enc,
                           std::string label) {
  circuit.validate(kDefaultQubitCap);
  const std::size_t wdim = std::size_t{1} << circuit.w;
  if (static_cast<std::size_t>(witness.size()) != wdim)
    throw std::invalid_argument("history_state: witness dimension " + std::to_string(witness.size()) +
                                " does not match 2^w = " + std::to_string(wdim));
  if (std::abs(witness.norm() - 1.0) > 1e-10) throw std::invalid_argument("history_state: witness is not unit norm");
  const int n = circuit.qubits(), T = circuit.T();
  const std::size_t sys = std::size_t{1} << n;
  const std::size_t cdim = enc == ClockEncoding::ideal ? static_cast<std::size_t>(T + 1) : (std::size_t{1} << T);
  CVector v = CVector::Zero(sys);
  v.head(wdim) = witness;
  CVector out = CVector::Zero(sys * cdim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(T + 1));
  for (int t = 0; t <= T; ++t) {
    if (t > 0) apply_gate(circuit.gates[t - 1], v, n);
    const std::size_t c = clock_index(enc, T, t);
    for (std::size_t s = 0; s < sys; ++s) out[s * cdim + c] = amp * v[s];
  }
  return {out, label};
}

double unperturbed_gap(const ClockHamiltonian& clock) {
  const RVector e = hermitian_eigenvalues(clock.unperturbed());
  const std::size_t k = clock.kernel_dim();
  if (static_cast<std::size_t>(e.size()) <= k) throw std::domain_error("unperturbed_gap: no state above the kernel");
  return e(static_cast<Eigen::Index>(k));
}

std::vector<double> predicted_spectrum(const ClockHamiltonian& clock, const AcceptOperator& q) {
  if (clock.epsilon == 0.0) return predicted_spectrum(clock, q, std::numeric_limits<double>::infinity());
  return predicted_spectrum(clock, q, unperturbed_gap(clock));
}

std::vector<double> predicted_spectrum(const ClockHamiltonian& clock, const AcceptOperator& q, double delta0) {
  if (!(clock.epsilon < delta0 / 16.0))
    throw std::invalid_argument("predicted_spectrum: epsilon " + std::to_string(clock.epsilon) +
                                " is not below delta0/16 (delta0 = " + std::to_string(delta0) + ")");
  const double scale = clock.epsilon / (clock.T + 1);
  std::vector<double> out;
  if (clock.mode == WitnessMode::no_witness) {
    out.push_back(scale * (1.0 - q.q(0, 0).real()));
    return out;
  }
  for (Eigen::Index i = 0; i < q.eigenvalues.size(); ++i) out.push_back(scale * (1.0 - q.eigenvalues(i)));
  std::sort(out.begin(), out.end());
  return out;
}

double epsilon_schedule(const PromiseParams& p, int T, int n, EpsilonRegime regime) {
  if (T < 1 || n < 1) throw std::invalid_argument("epsilon_schedule: need T >= 1 and n >= 1");
  const double t4 = std::pow(static_cast<double>(T), 4);
  const double gap = p.c - p.s;
  switch (regime) {
    case EpsilonRegime::egqma:
      return std::min({p.g1, p.g2, gap}) / (n * t4);
    case EpsilonRegime::gs_description:
      return gap / t4;
    case EpsilonRegime::bqp_hard:
      return gap / (n * t4);
  }
  return 0.0;
}

}  // namespace qgap
