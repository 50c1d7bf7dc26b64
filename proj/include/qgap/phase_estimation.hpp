#pragma once

#include <string>
#include <vector>

#include "qgap/circuits.hpp"
#include "qgap/estimators.hpp"
#include "qgap/linalg.hpp"

namespace qgap {

struct PhaseEstPlan {
  double t = 0.0;
  double norm_bound = 0.0;  // d * k
  double sim_error = 0.0;
  std::size_t row_sparsity = 0;
  double max_entry = 0.0;
};

PhaseEstPlan choose_time(const SparseHermitian& h);

enum class PeMode { closed_form, circuit };

// Hadamard, controlled e^{-iHt}, Hadamard; accept on ancilla |0>.
double one_bit_pe_accept(const SparseHermitian& h, double t, const CVector& state, PeMode mode);
// Same circuit with an arbitrary controlled unitary.
double one_bit_pe_accept_unitary(const CMatrix& u, const CVector& state);

double pe_gap_bound(double e0, double e1, double t);
double convex_energy_bound(const std::vector<double>& probs, const std::vector<double>& energies,
                           double mean_energy, double t);
double min_accept_gap(double delta, double f_n);

// 5(b-a)^3 / (24 f^2): energy slack admitted for a YES witness.
double witness_energy_slack(double a_val, double b_val, double f_n);
// 5(b-a)^2 / (24 f^2): accept-probability margin above cos^2(bt/2).
double witness_accept_margin(double a_val, double b_val, double f_n);

DecisionOutcome gs_description_verify(const SparseHermitian& h, const VerifierCircuit& witness_circuit,
                                      double a_val, double b_val, double f_n, bool gapped = false);

// One- or two-qubit circuit whose first column is psi (single dense gate).
VerifierCircuit state_preparation_circuit(const CVector& psi);
// Accept probability of each witness circuit, t = 1/f_n.
std::vector<double> witness_accept_probs(const SparseHermitian& h, const std::vector<VerifierCircuit>& witnesses,
                                         double f_n);

std::string accept_table_csv(const std::vector<double>& accept_probs);

}  // namespace qgap
