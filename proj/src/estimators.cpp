#include "qgap/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qgap/wide_real.hpp"

namespace qgap {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "YES";
    case Verdict::no:
      return "NO";
    case Verdict::inconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

PowerPlan choose_power(double c, double s, double delta, int w) {
  if (!(delta > 0.0)) throw std::invalid_argument("choose_power: delta must be positive");
  if (s < delta)
    throw std::invalid_argument("choose_power: s = " + std::to_string(s) + " < delta = " + std::to_string(delta) +
                                "; promise unsatisfiable");
  if (!(c > s)) throw std::invalid_argument("choose_power: need c > s");
  if (w < 0) throw std::invalid_argument("choose_power: negative witness size");
  const double arg = std::ldexp(s, w + 1) / (c - s);
  const double raw = std::ceil((s / delta) * std::log(arg));
  PowerPlan p;
  p.q = static_cast<int>(std::max(1.0, raw));
  p.yes_threshold = std::pow(c, p.q);
  p.no_threshold = p.yes_threshold - std::pow(s, p.q) * (c - s) / (2.0 * s);
  p.margin = std::pow(s, p.q) * (c - s) / (2.0 * s);
  return p;
}

double power_no_bound(const PowerPlan& plan, double s, double delta, int w) {
  const double sq = std::pow(s, plan.q);
  return sq + sq * (std::ldexp(1.0, w) - 1.0) * std::pow(1.0 - delta / s, plan.q);
}

double trace_power(const CMatrix& q_op, int q, TraceMethod method, int threads) {
  if (method == TraceMethod::pathsum) return trace_power(SparseHermitian::from_dense(q_op), q, method, threads);
  if (q < 1) throw std::invalid_argument("trace_power: q must be >= 1");
  if (q_op.rows() != q_op.cols()) throw std::invalid_argument("trace_power: matrix is not square");
  CMatrix p = q_op;
  for (int k = 1; k < q; ++k) p = p * q_op;
  return p.trace().real();
}

namespace {

cplx paths_from(const SparseHermitian& m, std::size_t start, int q) {
  // sum over x_2..x_q of Q[start][x_2] Q[x_2][x_3] ... Q[x_q][start]
  cplx total = 0.0;
  std::vector<std::size_t> idx(q, 0);
  std::vector<cplx> prod(q + 1);
  std::vector<std::size_t> node(q + 1);
  node[0] = start;
  prod[0] = 1.0;
  int depth = 0;
  while (depth >= 0) {
    if (depth == q - 1) {
      total += prod[depth] * m.entry(node[depth], start);
      --depth;
      if (depth >= 0) ++idx[depth];
      continue;
    }
    const auto& row = m.row(node[depth]);
    if (idx[depth] >= row.size()) {
      idx[depth] = 0;
      --depth;
      if (depth >= 0) ++idx[depth];
      continue;
    }
    const auto& e = row[idx[depth]];
    node[depth + 1] = e.col;
    prod[depth + 1] = prod[depth] * e.value;
    ++depth;
    idx[depth] = 0;
  }
  return total;
}

}  // namespace

double trace_power(const SparseHermitian& m, int q, TraceMethod method, int threads) {
  if (q < 1) throw std::invalid_argument("trace_power: q must be >= 1");
  if (method == TraceMethod::direct) return trace_power(m.to_dense(), q, method, threads);
  const std::size_t d = m.dim();
  const double cost = static_cast<double>(d) * std::pow(static_cast<double>(std::max<std::size_t>(1, m.row_sparsity())), q - 1);
  if (d > 64 || q > 6 || cost > std::ldexp(1.0, 28))
    throw std::invalid_argument("trace_power: pathsum needs dim <= 64 and q <= 6 within 2^28 paths; got dim " +
                                std::to_string(d) + ", q " + std::to_string(q) + ", estimated " +
                                std::to_string(cost) + " paths");
  std::vector<cplx> partial(d);
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(d)));
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t s = t; s < d; s += workers) partial[s] = paths_from(m, s, q);
    });
  for (auto& th : pool) th.join();
  cplx total = 0.0;
  for (const auto& p : partial) total += p;
  return total.real();
}

DecisionOutcome decide_power(const AcceptOperator& q_op, const PromiseParams& params) {
  params.validate();
  const double delta = std::min(params.g1, params.g2);
  const int w = static_cast<int>(std::lround(std::log2(static_cast<double>(q_op.q.rows()))));
  const PowerPlan plan = choose_power(params.c, params.s, delta, w);
  DecisionOutcome out;
  out.statistic = trace_power(q_op.q, plan.q, TraceMethod::direct);
  out.lower = plan.no_threshold;
  out.upper = plan.yes_threshold;
  const double mid = 0.5 * (plan.yes_threshold + plan.no_threshold);
  // rounding error of a sum of dim eigenvalue powers
  const double noise = 4.0 * plan.q * static_cast<double>(q_op.q.rows()) * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(out.statistic), mid);
  if (std::abs(out.statistic - mid) <= noise)
    out.verdict = Verdict::inconclusive;
  else
    out.verdict = out.statistic >= mid ? Verdict::yes : Verdict::no;
  out.detail = "q=" + std::to_string(plan.q);
  return out;
}

void CoolingPlan::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("cooling plan: beta must be positive");
  if (!(norm_bound >= 0.0)) throw std::invalid_argument("cooling plan: negative norm bound");
  if (!(k_order > 2.0 * beta * std::exp(1.0) * norm_bound + f_n))
    throw std::invalid_argument("cooling plan: K = " + std::to_string(k_order) + " is not above 2 beta e ||H|| + f(n) = " +
                                std::to_string(2.0 * beta * std::exp(1.0) * norm_bound + f_n));
}

CoolingPlan make_cooling_plan(double beta, double norm_bound, double f_n) {
  CoolingPlan p;
  p.beta = beta;
  p.norm_bound = norm_bound;
  p.f_n = f_n;
  p.k_order = static_cast<int>(std::floor(2.0 * beta * std::exp(1.0) * norm_bound + f_n)) + 1;
  p.validate();
  return p;
}

double gershgorin_bound(const SparseHermitian& h) {
  double b = 0.0;
  for (std::size_t i = 0; i < h.dim(); ++i) {
    double r = 0.0;
    for (const auto& e : h.row(i)) r += std::abs(e.value);
    b = std::max(b, r);
  }
  return b;
}

namespace {

long taylor_bits(const CoolingPlan& plan) {
  const double digits = 0.4343 * (2.0 * plan.beta * plan.norm_bound + plan.f_n) + 30.0;
  return static_cast<long>(std::ceil(digits * 3.3220)) + 64;
}

double exact_thermal(const EigenPairs& ep, const CMatrix& a, double beta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < ep.values.size(); ++i) {
    const CVector v = ep.vectors.col(i);
    total += std::exp(-2.0 * beta * ep.values(i)) * (v.adjoint() * a * v)(0, 0).real();
  }
  return total;
}

}  // namespace

double thermal_expectation(const SparseHermitian& h, const SparseHermitian& a, const CoolingPlan& plan,
                           ThermalMethod method) {
  plan.validate();
  if (h.dim() != a.dim()) throw std::invalid_argument("thermal_expectation: dimension mismatch");
  const CMatrix hd = h.to_dense();
  const double hn = operator_norm(hd);
  if (plan.norm_bound < hn - 1e-12)
    throw std::invalid_argument("thermal_expectation: plan norm bound " + std::to_string(plan.norm_bound) +
                                " is below ||H|| = " + std::to_string(hn));
  if (method == ThermalMethod::exact) return exact_thermal(hermitian_eigen(hd), a.to_dense(), plan.beta);
  return taylor_thermal_trace(h, a, plan.beta, plan.k_order, taylor_bits(plan));
}

double taylor_remainder_bound(const CoolingPlan& plan, const SparseHermitian& a, double constant) {
  const double x = 2.0 * plan.beta * plan.norm_bound;
  const double an = trace_norm(a.to_dense());
  if (x == 0.0 || an == 0.0) return 0.0;
  const int k1 = plan.k_order + 1;
  return constant * an * std::exp(k1 * std::log(x) - std::lgamma(k1 + 1.0));
}

double thermal_ground_overlap(const RVector& e, double beta) {
  if (e.size() == 0) throw std::invalid_argument("thermal_ground_overlap: empty spectrum");
  const double e1 = e.minCoeff();
  double z = 0.0;
  bool skipped = false;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (!skipped && e(i) == e1) {
      skipped = true;
      continue;
    }
    z += std::exp(-2.0 * beta * (e(i) - e1));
  }
  return 1.0 / (1.0 + z);
}

DecisionOutcome cooling_decide(const SparseHermitian& h, const SparseHermitian& a, double a_val, double b_val,
                               double delta, int n) {
  if (h.dim() != a.dim()) throw std::invalid_argument("cooling_decide: dimension mismatch");
  if (n < 1 || h.dim() != (std::size_t{1} << n)) throw std::invalid_argument("cooling_decide: dimension must be 2^n");
  if (!(b_val > a_val)) throw std::invalid_argument("cooling_decide: need b > a");
  if (!(delta > 0.0)) throw std::invalid_argument("cooling_decide: delta must be positive");
  const double anorm = operator_norm(a.to_dense());
  if (anorm > 1e6) throw std::invalid_argument("cooling_decide: ||A|| too large");
  DecisionOutcome out;
  out.lower = a_val;
  out.upper = b_val;
  const RVector e = hermitian_eigenvalues(h.to_dense());
  const double measured_gap = e.size() > 1 ? e(1) - e(0) : 0.0;
  if (measured_gap < delta) {
    out.verdict = Verdict::inconclusive;
    out.detail = "gap promise violated: measured " + std::to_string(measured_gap);
    return out;
  }

  double shift = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < h.dim(); ++i) {
    double off = 0.0;
    for (const auto& x : h.row(i))
      if (x.col != i) off += std::abs(x.value);
    const double lb = h.entry(i, i).real() - off;
    shift = first ? lb : std::min(shift, lb);
    first = false;
  }
  SparseHermitian hs(h.dim()), id(h.dim());
  for (std::size_t i = 0; i < h.dim(); ++i) {
    for (const auto& x : h.row(i)) hs.add(i, x.col, x.value);
    hs.add(i, i, -shift);
    id.add(i, i, 1.0);
  }
  hs.finalize();
  id.finalize();

  const double beta = n / delta;
  const double nb = gershgorin_bound(hs);
  const double f_n = 2.0 * beta * nb + n * std::log(2.0) + 30.0;
  const CoolingPlan plan = make_cooling_plan(beta, nb, f_n);
  const long bits = taylor_bits(plan);
  const double z = taylor_thermal_trace(hs, id, beta, plan.k_order, bits);
  const double num = taylor_thermal_trace(hs, a, beta, plan.k_order, bits);

  double lo = 0.5 * std::exp(-2.0 * beta * nb), hi = 2.0 * static_cast<double>(h.dim());
  int queries = 0;
  while (hi / lo - 1.0 > 1e-12 && queries < 400) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= z)
      lo = mid;
    else
      hi = mid;
    ++queries;
  }
  const double norm_est = std::sqrt(lo * hi);
  out.statistic = num / norm_est;
  const double mid = 0.5 * (a_val + b_val);
  out.verdict = out.statistic <= mid ? Verdict::yes : Verdict::no;
  out.detail = "beta=" + std::to_string(beta) + " K=" + std::to_string(plan.k_order) +
               " queries=" + std::to_string(queries);
  return out;
}

double postqma_margin(int w, int t, int u) {
  if (w < 0 || t < 0 || u < 0) throw std::invalid_argument("postqma_margin: arguments must be nonnegative");
  return std::ldexp(1.0 - std::ldexp(1.0, -t), -w) - std::ldexp(1.0, -u);
}

DecisionOutcome asymmetric_decide(const AcceptOperator& q_op, const PromiseParams& params) {
  params.validate();
  if (!(params.g1 > 0.0)) throw std::invalid_argument("asymmetric_decide: g1 must be positive");
  const double gap = q_op.gap();
  if (gap <= params.g1 / 2.0) {
    DecisionOutcome out;
    out.verdict = Verdict::no;
    out.statistic = gap;
    out.lower = params.g1 / 2.0;
    out.upper = params.g1;
    out.detail = "step 1: no spectral gap";
    return out;
  }
  PromiseParams p = params;
  p.g1 = params.g1 / 2.0;
  p.g2 = params.g1 / 2.0;
  DecisionOutcome out = decide_power(q_op, p);
  out.detail = "step 2: " + out.detail;
  return out;
}

}  // namespace qgap
