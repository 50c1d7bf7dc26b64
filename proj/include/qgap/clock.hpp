#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qgap/circuits.hpp"
#include "qgap/linalg.hpp"

namespace qgap {

enum class ClockEncoding { ideal, unary };
enum class WitnessMode { with_witness, no_witness };

inline constexpr std::size_t kClockDimCap = 4096;

// Basis index = system_index * clock_dim + clock_index.
struct ClockHamiltonian {
  CMatrix h_input, h_prop, h_output, h_clock;
  double epsilon = 0.0;
  int T = 0;
  ClockEncoding encoding = ClockEncoding::ideal;
  WitnessMode mode = WitnessMode::with_witness;
  int system_qubits = 0;
  std::size_t clock_dim = 0;
  int w = 0;

  CMatrix total() const { return h_input + h_prop + h_output + h_clock; }
  CMatrix unperturbed() const { return h_input + h_prop + h_clock; }
  std::size_t dim() const { return static_cast<std::size_t>(h_prop.rows()); }
  std::size_t kernel_dim() const;
};

struct HistoryState {
  CVector vector;
  std::string witness_label;
};

ClockHamiltonian build_clock(const VerifierCircuit& circuit, double epsilon,
                             ClockEncoding encoding = ClockEncoding::ideal,
                             WitnessMode mode = WitnessMode::with_witness, std::size_t dim_cap = kClockDimCap);

std::size_t clock_index(ClockEncoding encoding, int T, int t);

HistoryState history_state(const VerifierCircuit& circuit, const CVector& witness,
                           ClockEncoding encoding = ClockEncoding::ideal, std::string label = "");

// Energy of the first state above the eps=0 kernel.
double unperturbed_gap(const ClockHamiltonian& clock);

std::vector<double> predicted_spectrum(const ClockHamiltonian& clock, const AcceptOperator& q);
std::vector<double> predicted_spectrum(const ClockHamiltonian& clock, const AcceptOperator& q, double delta0);

enum class EpsilonRegime { egqma, gs_description, bqp_hard };
double epsilon_schedule(const PromiseParams& params, int T, int n, EpsilonRegime regime);

}  // namespace qgap
