#pragma once

#include <string>

#include "qgap/circuits.hpp"
#include "qgap/linalg.hpp"

namespace qgap {

enum class Verdict { yes, no, inconclusive };
std::string to_string(Verdict v);

struct DecisionOutcome {
  Verdict verdict = Verdict::inconclusive;
  double statistic = 0.0;
  double lower = 0.0;  // thresholds, in the order the procedure states them
  double upper = 0.0;
  std::string detail;
};

struct PowerPlan {
  int q = 1;
  double yes_threshold = 0.0;
  double no_threshold = 0.0;
  double margin = 0.0;
};

PowerPlan choose_power(double c, double s, double delta, int w);
// s^q + s^q (2^w - 1)(1 - delta/s)^q
double power_no_bound(const PowerPlan& plan, double s, double delta, int w);

enum class TraceMethod { direct, pathsum };
double trace_power(const CMatrix& q_op, int q, TraceMethod method, int threads = 1);
double trace_power(const SparseHermitian& q_op, int q, TraceMethod method, int threads = 1);

DecisionOutcome decide_power(const AcceptOperator& q_op, const PromiseParams& params);

inline constexpr double kTaylorConstant = 4.0;

struct CoolingPlan {
  double beta = 0.0;
  int k_order = 0;
  double f_n = 0.0;
  double norm_bound = 0.0;
  void validate() const;
};

CoolingPlan make_cooling_plan(double beta, double norm_bound, double f_n);
double gershgorin_bound(const SparseHermitian& h);

enum class ThermalMethod { exact, taylor };
double thermal_expectation(const SparseHermitian& h, const SparseHermitian& a, const CoolingPlan& plan,
                           ThermalMethod method);
// (2 beta ||H||)^{K+1}/(K+1)! * ||A||_1 * C
double taylor_remainder_bound(const CoolingPlan& plan, const SparseHermitian& a, double constant = kTaylorConstant);
// Tr[rho_beta |E1><E1|] via (1 + sum_{i>1} e^{-2 beta (E_i - E_1)})^{-1}
double thermal_ground_overlap(const RVector& energies, double beta);

DecisionOutcome cooling_decide(const SparseHermitian& h, const SparseHermitian& a, double a_val, double b_val,
                               double delta, int n);

double postqma_margin(int w, int t, int u);

DecisionOutcome asymmetric_decide(const AcceptOperator& q_op, const PromiseParams& params);

}  // namespace qgap
