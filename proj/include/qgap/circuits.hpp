#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qgap/linalg.hpp"

namespace qgap {

inline constexpr int kDefaultQubitCap = 14;

struct GateOp {
  std::string label;
  CMatrix matrix;
  std::vector<int> targets;
};

// Validates unitarity (1e-12) and target count against the matrix size.
GateOp make_gate(std::string label, CMatrix matrix, std::vector<int> targets);

namespace gates {
CMatrix h();
CMatrix x();
CMatrix z();
CMatrix s();
CMatrix t();
CMatrix tdg();
CMatrix ry(double theta);
CMatrix cnot();
CMatrix cz();
CMatrix cphase(double phi);
CMatrix controlled(const CMatrix& u);
}  // namespace gates

GateOp H(int q);
GateOp X(int q);
GateOp Z(int q);
GateOp S(int q);
GateOp T(int q);
GateOp Tdg(int q);
GateOp Ry(int q, double theta);
GateOp CNOT(int control, int target);
GateOp CZ(int a, int b);
GateOp CPhase(int a, int b, double phi);
GateOp Controlled(int control, int target, const CMatrix& u, std::string label = "CU");

// Qubit 0 is the most significant bit of a basis index. Ancillas occupy
// qubits [0, m), witness qubits [m, m+w).
struct VerifierCircuit {
  int m = 0;
  int w = 0;
  int decision = 0;
  std::vector<GateOp> gates;

  int qubits() const { return m + w; }
  int T() const { return static_cast<int>(gates.size()); }
  void validate(int qubit_cap = kDefaultQubitCap) const;
};

struct AcceptOperator {
  CMatrix q;
  RVector eigenvalues;  // nonincreasing
  CMatrix eigenvectors;

  double lambda1() const { return eigenvalues(0); }
  double gap() const { return eigenvalues.size() > 1 ? eigenvalues(0) - eigenvalues(1) : 0.0; }
};

struct PromiseParams {
  double c = 1.0;
  double s = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  int w = 0;
  void validate() const;
};

void append_toffoli(std::vector<GateOp>& gates, int a, int b, int target);
// Multi-controlled X using clean ancillas (controls.size()-2 of them), returned clean.
void append_mcx(std::vector<GateOp>& gates, const std::vector<int>& controls, int target,
                const std::vector<int>& ancillas);

void apply_gate(const GateOp& g, CVector& state, int nqubits);
CVector apply_circuit(const VerifierCircuit& circuit, const CVector& state);

// Pr(decision = 1) for input |0^m> (x) witness.
double accept_probability(const VerifierCircuit& circuit, const CVector& witness,
                          int qubit_cap = kDefaultQubitCap);
AcceptOperator accept_operator(const VerifierCircuit& circuit, int qubit_cap = kDefaultQubitCap);
AcceptOperator make_accept_operator(const CMatrix& q);

VerifierCircuit classical_witness_extend(const VerifierCircuit& circuit);
VerifierCircuit flag_qubit_transform(const VerifierCircuit& circuit, const PromiseParams& params, int poly_factor);
int min_reject_exponent(const VerifierCircuit& circuit, const PromiseParams& params);
VerifierCircuit distinct_prob_transform(const VerifierCircuit& circuit, const PromiseParams& params,
                                        int reject_exponent);

struct QueryPair {
  double c;
  double s;
};
std::vector<QueryPair> uqcma_query_schedule(double c, double g1);

}  // namespace qgap
