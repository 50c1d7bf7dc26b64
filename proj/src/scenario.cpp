#include "qgap/scenario.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qgap/circuit_io.hpp"
#include "qgap/circuits.hpp"
#include "qgap/clock.hpp"
#include "qgap/configgraph.hpp"
#include "qgap/estimators.hpp"
#include "qgap/phase_estimation.hpp"
#include "qgap/random_instances.hpp"
#include "qgap/schrieffer_wolff.hpp"

namespace qgap {

namespace fs = std::filesystem;

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"clock-spectrum", "power-decide", "cooling",  "phase-est",
                                              "gs-verify",      "tm-graph",     "sw-check", "transforms"};
  return names;
}

namespace {

const std::set<std::string> kInputKeys{"circuit", "hamiltonian", "observable", "witness_circuit", "tm"};

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"clock-spectrum",
       {"circuit", "random.m", "random.w", "random.gates", "epsilon", "epsilon_ratio", "encoding", "witness_mode"}},
      {"power-decide", {"circuit", "random.w", "random.kind", "c", "s", "g1", "g2"}},
      {"cooling",
       {"hamiltonian", "observable", "random.qubits", "random.ground", "random.gap", "random.spread", "random.kind",
        "a", "b", "delta"}},
      {"phase-est", {"hamiltonian", "random.qubits", "states", "table"}},
      {"gs-verify",
       {"hamiltonian", "random.qubits", "random.ground", "random.gap", "random.spread", "a", "b", "f_n", "gapped",
        "witness", "witness_circuit", "table"}},
      {"tm-graph", {"tm", "input", "tail", "enumeration", "edges", "oracle_cap"}},
      {"sw-check", {"mode", "random.dim", "random.ground_rank", "random.eps_ratio", "circuit", "epsilon_ratio"}},
      {"transforms",
       {"circuit", "random.w", "c", "s", "g1", "poly_factor", "reject_exponent", "pairs", "postqma_max"}},
  };
  return keys;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& what) {
  throw std::invalid_argument("config: " + key + " = '" + value + "' is not " + what);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

SparseHermitian load_coo(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::invalid_argument("cannot open " + p.string());
  return SparseHermitian::read_coo(in);
}

int qubits_of(std::size_t dim, const std::string& what) {
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim) throw std::invalid_argument(what + ": dimension " + std::to_string(dim) + " is not a power of two");
  return n;
}

double cos2(double x) { return std::cos(x) * std::cos(x); }

class Checks {
 public:
  void add(const std::string& name, bool ok, double value, double bound) {
    list_.push_back({{"name", name}, {"status", ok ? "PASS" : "FAIL"}, {"value", value}, {"bound", bound}});
    pass_ = pass_ && ok;
  }
  void skip(const std::string& name, const std::string& reason) {
    list_.push_back({{"name", name}, {"status", "SKIP"}, {"reason", reason}});
  }
  const Report& list() const { return list_; }
  bool pass() const { return pass_; }

 private:
  Report list_ = Report::array();
  bool pass_ = true;
};

struct Context {
  explicit Context(const ScenarioConfig& c) : cfg(c), rng(c.seed) {}
  const ScenarioConfig& cfg;
  Rng rng;
  Report stats = Report::object();
  Report bounds = Report::object();
  Checks checks;
};

void write_output(const ScenarioConfig& cfg, const std::string& key, const std::string& text) {
  const fs::path p = cfg.path(key);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + p.string());
  out << text;
}

VerifierCircuit circuit_input(Context& ctx, int default_m, int default_w, int default_gates) {
  if (ctx.cfg.has("circuit")) return load_circuit(ctx.cfg.path("circuit").string());
  return random_circuit(ctx.rng, ctx.cfg.get_int("random.m", default_m), ctx.cfg.get_int("random.w", default_w),
                        ctx.cfg.get_int("random.gates", default_gates));
}

PromiseParams promise_from(const ScenarioConfig& cfg, double c, double s, double g1, double g2, int w) {
  PromiseParams p;
  p.c = cfg.get_double("c", c);
  p.s = cfg.get_double("s", s);
  p.g1 = cfg.get_double("g1", g1);
  p.g2 = cfg.get_double("g2", g2);
  p.w = w;
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

void run_clock(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  const VerifierCircuit circuit = circuit_input(ctx, 1, 2, 4);
  const std::string enc = cfg.get("encoding", "ideal");
  if (enc != "ideal" && enc != "unary") bad_value("encoding", enc, "ideal or unary");
  const std::string wm = cfg.get("witness_mode", "with");
  if (wm != "with" && wm != "none") bad_value("witness_mode", wm, "with or none");
  const ClockEncoding encoding = enc == "ideal" ? ClockEncoding::ideal : ClockEncoding::unary;
  const WitnessMode mode = wm == "with" ? WitnessMode::with_witness : WitnessMode::no_witness;

  const double delta0 = unperturbed_gap(build_clock(circuit, 1.0, encoding, mode));
  const double eps = cfg.has("epsilon") ? cfg.get_double("epsilon", 0.0) : delta0 * cfg.get_double("epsilon_ratio", 1.0 / 160);
  const ClockHamiltonian clock = build_clock(circuit, eps, encoding, mode);
  const AcceptOperator q = accept_operator(circuit);
  const std::vector<double> predicted = predicted_spectrum(clock, q, delta0);
  const RVector exact = hermitian_eigenvalues(clock.total());

  double dev = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) dev = std::max(dev, std::abs(exact(i) - predicted[i]));
  const double track = 10.0 * eps * eps / delta0;
  const double inherit = 20.0 * eps * eps / delta0;

  ctx.stats["qubits"] = circuit.qubits();
  ctx.stats["T"] = circuit.T();
  ctx.stats["dimension"] = clock.dim();
  ctx.stats["delta0"] = delta0;
  ctx.stats["epsilon"] = eps;
  ctx.stats["lambda1"] = q.lambda1();
  ctx.stats["lambda2"] = q.eigenvalues.size() > 1 ? q.eigenvalues(1) : 0.0;
  ctx.stats["E1"] = exact(0);
  ctx.stats["E2"] = exact(1);
  ctx.stats["gap"] = exact(1) - exact(0);
  ctx.stats["max_deviation"] = dev;
  ctx.bounds["tracking"] = track;
  ctx.bounds["gap_inheritance"] = inherit;
  ctx.checks.add("low_spectrum_tracking", dev <= track, dev, track);
  if (mode == WitnessMode::with_witness && q.eigenvalues.size() > 1) {
    const double want = eps * (q.lambda1() - q.eigenvalues(1)) / (clock.T + 1);
    const double err = std::abs((exact(1) - exact(0)) - want);
    ctx.checks.add("gap_inheritance", err <= inherit, err, inherit);
  } else {
    ctx.checks.skip("gap_inheritance", "single predicted level");
  }
}

void run_power(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  AcceptOperator q;
  PromiseParams p;
  if (cfg.has("circuit")) {
    const VerifierCircuit circuit = load_circuit(cfg.path("circuit").string());
    q = accept_operator(circuit);
    p = promise_from(cfg, 0.9, 0.5, 0.3, 0.3, circuit.w);
  } else {
    const int w = cfg.get_int("random.w", 3);
    p = promise_from(cfg, 0.9, 0.5, 0.3, 0.3, w);
    choose_power(p.c, p.s, std::min(p.g1, p.g2), p.w);
    const std::string kind = cfg.get("random.kind", "yes");
    if (kind != "yes" && kind != "no") bad_value("random.kind", kind, "yes or no");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int dim = 1 << w;
    const double l1 = kind == "yes" ? p.c + (1.0 - p.c) * u(ctx.rng) : p.g2 + (p.s - p.g2) * u(ctx.rng);
    const double top = l1 - (kind == "yes" ? p.g1 : p.g2);
    if (top < 0) throw std::invalid_argument("power-decide: promise leaves no room for the remaining eigenvalues");
    RVector ev(dim);
    ev(0) = l1;
    for (int k = 1; k < dim; ++k) ev(k) = top * u(ctx.rng);
    const CMatrix v = random_unitary(ctx.rng, dim);
    CMatrix m = v * ev.cast<cplx>().asDiagonal() * v.adjoint();
    q = make_accept_operator((m + m.adjoint()) * 0.5);
  }
  const DecisionOutcome out = decide_power(q, p);
  const PowerPlan plan = choose_power(p.c, p.s, std::min(p.g1, p.g2), p.w);
  const double l1 = q.lambda1(), gap = q.gap();
  std::string expected = "outside";
  if (l1 >= p.c && gap >= p.g1) expected = "YES";
  if (l1 <= p.s && gap >= p.g2) expected = "NO";

  ctx.stats["w"] = p.w;
  ctx.stats["lambda1"] = l1;
  ctx.stats["gap"] = gap;
  ctx.stats["q"] = plan.q;
  ctx.stats["trace"] = out.statistic;
  ctx.stats["verdict"] = to_string(out.verdict);
  ctx.stats["expected"] = expected;
  ctx.bounds["yes_threshold"] = plan.yes_threshold;
  ctx.bounds["no_threshold"] = plan.no_threshold;
  ctx.bounds["separation"] = plan.margin;
  if (expected == "outside")
    ctx.checks.skip("verdict_matches_exact", "instance violates the promise");
  else
    ctx.checks.add("verdict_matches_exact", to_string(out.verdict) == expected, out.statistic,
                   0.5 * (plan.yes_threshold + plan.no_threshold));
  const double no_bound = power_no_bound(plan, p.s, std::min(p.g1, p.g2), p.w);
  ctx.checks.add("separation", no_bound <= plan.no_threshold * (1 + 1e-12), no_bound, plan.no_threshold);
  if (q.q.rows() <= 64 && plan.q <= 6) {
    try {
      const double ps = trace_power(q.q, plan.q, TraceMethod::pathsum, cfg.threads);
      ctx.stats["pathsum_trace"] = ps;
      ctx.checks.add("pathsum_matches_direct", std::abs(ps - out.statistic) <= 1e-9, std::abs(ps - out.statistic),
                     1e-9);
    } catch (const std::invalid_argument& e) {
      ctx.checks.skip("pathsum_matches_direct", e.what());
    }
  } else {
    ctx.checks.skip("pathsum_matches_direct", "path sum outside its size cap");
  }
}

void run_cooling(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SparseHermitian h, a;
  double a_val = 0, b_val = 0;
  CMatrix hd, ad;
  if (cfg.has("hamiltonian")) {
    if (!cfg.has("observable") || !cfg.has("a") || !cfg.has("b"))
      throw std::invalid_argument("cooling: hamiltonian input also needs observable, a and b");
    h = load_coo(cfg.path("hamiltonian"));
    a = load_coo(cfg.path("observable"));
    hd = h.to_dense();
    ad = a.to_dense();
  } else {
    const int n = cfg.get_int("random.qubits", 3);
    hd = random_gapped_hamiltonian(ctx.rng, 1 << n, cfg.get_double("random.ground", 0.0),
                                   cfg.get_double("random.gap", 0.6), cfg.get_double("random.spread", 1.0));
    ad = random_hermitian(ctx.rng, 1 << n, 0.5);
    h = SparseHermitian::from_dense(hd, 1e-15);
    a = SparseHermitian::from_dense(ad, 1e-15);
  }
  const int n = qubits_of(h.dim(), "cooling");
  const EigenPairs ep = hermitian_eigen(hd);
  const CVector g = ep.vectors.col(0);
  const double ground = (g.adjoint() * ad * g)(0, 0).real();
  if (cfg.has("hamiltonian")) {
    a_val = cfg.get_double("a", 0);
    b_val = cfg.get_double("b", 0);
  } else {
    const std::string kind = cfg.get("random.kind", "yes");
    if (kind != "yes" && kind != "no") bad_value("random.kind", kind, "yes or no");
    a_val = cfg.get_double("a", kind == "yes" ? ground + 0.1 : ground - 0.3);
    b_val = cfg.get_double("b", kind == "yes" ? ground + 0.3 : ground - 0.1);
  }
  const double delta = cfg.get_double("delta", 0.5);
  const DecisionOutcome out = cooling_decide(h, a, a_val, b_val, delta, n);
  std::string expected = "outside";
  if (ep.values(1) - ep.values(0) >= delta) {
    if (ground <= a_val) expected = "YES";
    if (ground >= b_val) expected = "NO";
  }

  // Taylor against exact at the inverse temperature the decision uses
  const double beta = n / delta;
  const double nb = gershgorin_bound(h);
  const CoolingPlan plan = make_cooling_plan(beta, nb, 30.0);
  const SparseHermitian id = SparseHermitian::from_dense(CMatrix::Identity(h.dim(), h.dim()));
  const double exact = thermal_expectation(h, a, plan, ThermalMethod::exact);
  const double taylor = thermal_expectation(h, a, plan, ThermalMethod::taylor);
  const double z = thermal_expectation(h, id, plan, ThermalMethod::exact);
  const double rem = taylor_remainder_bound(plan, a);
  const SparseHermitian proj = SparseHermitian::from_dense(g * g.adjoint(), 1e-15);
  const double overlap = thermal_expectation(h, proj, plan, ThermalMethod::exact) / z;
  const double closed = thermal_ground_overlap(ep.values, beta);

  ctx.stats["qubits"] = n;
  ctx.stats["E1"] = ep.values(0);
  ctx.stats["gap"] = ep.values(1) - ep.values(0);
  ctx.stats["ground_expectation"] = ground;
  ctx.stats["a"] = a_val;
  ctx.stats["b"] = b_val;
  ctx.stats["beta"] = beta;
  ctx.stats["k_order"] = plan.k_order;
  ctx.stats["thermal_expectation"] = exact / z;
  ctx.stats["taylor_error"] = std::abs(taylor - exact);
  ctx.stats["ground_overlap"] = overlap;
  ctx.stats["statistic"] = out.statistic;
  ctx.stats["verdict"] = to_string(out.verdict);
  ctx.stats["expected"] = expected;
  ctx.bounds["taylor_remainder"] = rem;
  ctx.bounds["norm_bound"] = nb;
  if (expected == "outside")
    ctx.checks.skip("verdict_matches_exact", "instance violates the promise");
  else
    ctx.checks.add("verdict_matches_exact", to_string(out.verdict) == expected, out.statistic, 0.5 * (a_val + b_val));
  ctx.checks.add("taylor_remainder", std::abs(taylor - exact) <= rem + 1e-12 * z, std::abs(taylor - exact),
                 rem + 1e-12 * z);
  ctx.checks.add("ground_overlap_closed_form", std::abs(overlap - closed) <= 1e-10, std::abs(overlap - closed), 1e-10);
}

void run_phase(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SparseHermitian h;
  if (cfg.has("hamiltonian"))
    h = load_coo(cfg.path("hamiltonian"));
  else
    h = SparseHermitian::from_dense(random_hermitian(ctx.rng, 1 << cfg.get_int("random.qubits", 2)), 1e-15);
  const CMatrix hd = h.to_dense();
  const PhaseEstPlan plan = choose_time(h);
  const RVector e = hermitian_eigenvalues(hd);
  const double norm = std::max(std::abs(e(0)), std::abs(e(e.size() - 1)));
  const int states = cfg.get_int("states", 20);
  if (states < 1) bad_value("states", std::to_string(states), "a positive count");
  double dev = 0.0;
  for (int i = 0; i < states; ++i) {
    const CVector psi = random_state(ctx.rng, static_cast<int>(h.dim()));
    dev = std::max(dev, std::abs(one_bit_pe_accept(h, plan.t, psi, PeMode::circuit) -
                                 one_bit_pe_accept(h, plan.t, psi, PeMode::closed_form)));
  }
  // gap bound on the shifted spectrum at t = 1/E_max
  const RVector s = e.array() - e(0);
  const double emax = s(s.size() - 1);
  double slack = 0.0;
  if (emax > 0) {
    const double t = 1.0 / emax;
    slack = 1.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      for (Eigen::Index j = i; j < s.size(); ++j)
        slack = std::min(slack, std::cos(s(i) * t) - std::cos(s(j) * t) - pe_gap_bound(s(i), s(j), t));
  }
  std::vector<double> table;
  for (std::size_t k = 0; k < h.dim(); ++k) {
    CVector b = CVector::Zero(h.dim());
    b[k] = 1.0;
    table.push_back(one_bit_pe_accept(h, plan.t, b, PeMode::circuit));
  }
  if (cfg.has("table")) write_output(cfg, "table", accept_table_csv(table));

  ctx.stats["dimension"] = h.dim();
  ctx.stats["row_sparsity"] = plan.row_sparsity;
  ctx.stats["max_entry"] = plan.max_entry;
  ctx.stats["t"] = plan.t;
  ctx.stats["norm"] = norm;
  ctx.stats["max_circuit_deviation"] = dev;
  ctx.stats["gap_bound_slack"] = slack;
  ctx.bounds["norm_bound"] = plan.norm_bound;
  ctx.checks.add("norm_bound", plan.norm_bound >= norm - 1e-10, norm, plan.norm_bound);
  ctx.checks.add("circuit_matches_closed_form", dev <= 1e-10, dev, 1e-10);
  ctx.checks.add("gap_bound", slack >= -1e-12, slack, -1e-12);
}

void run_gs_verify(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SparseHermitian h;
  if (cfg.has("hamiltonian")) {
    h = load_coo(cfg.path("hamiltonian"));
  } else {
    const int n = cfg.get_int("random.qubits", 2);
    h = SparseHermitian::from_dense(
        random_gapped_hamiltonian(ctx.rng, 1 << n, cfg.get_double("random.ground", 0.1),
                                  cfg.get_double("random.gap", 0.6), cfg.get_double("random.spread", 0.8)),
        1e-15);
  }
  const int n = qubits_of(h.dim(), "gs-verify");
  const CMatrix hd = h.to_dense();
  const EigenPairs ep = hermitian_eigen(hd);
  const Eigen::Index dim = ep.values.size();
  const double e1 = ep.values(0);
  const double f_n = cfg.get_double("f_n", std::max(std::abs(e1), std::abs(ep.values(dim - 1))));
  const double a_val = cfg.get_double("a", 0.15);
  const double b_val = cfg.get_double("b", 0.6);
  const bool gapped = cfg.get_bool("gapped", false);

  VerifierCircuit witness;
  if (cfg.has("witness_circuit")) {
    witness = load_circuit(cfg.path("witness_circuit").string());
  } else {
    const std::string choice = cfg.get("witness", "ground");
    if (choice == "ground") {
      witness = state_preparation_circuit(ep.vectors.col(0));
    } else if (choice.rfind("basis:", 0) == 0) {
      int k = -1;
      try {
        k = std::stoi(choice.substr(6));
      } catch (const std::exception&) {
      }
      if (k < 0 || k >= dim) bad_value("witness", choice, "basis:K with K in range");
      witness.m = n;
      for (int q = 0; q < n; ++q)
        if ((k >> (n - 1 - q)) & 1) witness.gates.push_back(X(q));
    } else {
      bad_value("witness", choice, "ground or basis:K");
    }
  }
  const DecisionOutcome out = gs_description_verify(h, witness, a_val, b_val, f_n, gapped);
  const bool trivial = out.detail.rfind("trivial", 0) == 0;

  CVector zero = CVector::Zero(dim);
  zero[0] = 1.0;
  const CVector psi = apply_circuit(witness, zero);
  const double energy = (psi.adjoint() * hd * psi)(0, 0).real();
  const double slack = witness_energy_slack(a_val, b_val, f_n);
  const double margin = witness_accept_margin(a_val, b_val, f_n);
  const double t = 1.0 / f_n;

  ctx.stats["qubits"] = n;
  ctx.stats["E1"] = e1;
  ctx.stats["gap"] = dim > 1 ? ep.values(1) - e1 : 0.0;
  ctx.stats["witness_energy"] = energy;
  ctx.stats["f_n"] = f_n;
  ctx.stats["t"] = t;
  ctx.stats["statistic"] = out.statistic;
  ctx.stats["branch"] = trivial ? "trivial" : "phase_estimation";
  ctx.stats["verdict"] = to_string(out.verdict);
  ctx.bounds["energy_slack"] = slack;
  ctx.bounds["accept_margin"] = margin;
  ctx.bounds["no_upper"] = out.lower;
  ctx.bounds["yes_lower"] = out.upper;

  std::vector<double> eig_probs;
  for (Eigen::Index j = 0; j < dim; ++j) eig_probs.push_back(cos2(ep.values(j) * t / 2.0));
  if (cfg.has("table")) write_output(cfg, "table", accept_table_csv(eig_probs));

  if (trivial) {
    ctx.checks.skip("yes_guarantee", "trivial branch");
    ctx.checks.skip("verdict_matches_promise", "trivial branch");
  } else if (e1 <= a_val && energy <= e1 + slack) {
    const double need = cos2(b_val * t / 2.0) + margin;
    ctx.checks.add("yes_guarantee", out.statistic >= need - 1e-12, out.statistic, need);
    ctx.checks.add("verdict_matches_promise", out.verdict == Verdict::yes, out.statistic, 0.5 * (out.lower + out.upper));
  } else if (e1 >= b_val) {
    const double cap = (1.0 + std::cos(b_val * t)) / 2.0;
    ctx.checks.add("no_bound", out.statistic <= cap + 1e-12, out.statistic, cap);
    ctx.checks.add("verdict_matches_promise", out.verdict == Verdict::no, out.statistic, 0.5 * (out.lower + out.upper));
  } else {
    ctx.checks.skip("verdict_matches_promise", "instance or witness outside the promise");
  }
  if (gapped && !trivial && dim > 1) {
    std::vector<double> sorted = eig_probs;
    std::sort(sorted.rbegin(), sorted.rend());
    const double measured = sorted[0] - sorted[1];
    const double delta = ep.values(1) - e1;
    const double want = min_accept_gap(std::min(delta, f_n), f_n);
    ctx.stats["eigen_witness_gap"] = measured;
    ctx.bounds["min_accept_gap"] = want;
    ctx.checks.add("accept_gap_bound", measured >= want, measured, want);
  }
}

std::vector<int> component_sizes(const ModifiedGraph& mg) {
  const int n = mg.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int j = 0; j < n; ++j)
    for (int i : mg.out[j]) parent[find(i)] = find(j);
  std::map<int, int> sizes;
  for (int v = 0; v < n; ++v) ++sizes[find(v)];
  const int root = find(mg.base.start);
  std::vector<int> out{sizes[root]};
  for (auto [r, size] : sizes)
    if (r != root) out.push_back(size);
  return out;
}

void run_tm(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  if (!cfg.has("tm")) throw std::invalid_argument("tm-graph: tm = <path> is required");
  const ReversibleTM tm = load_tm(cfg.path("tm").string());
  const std::string input = cfg.get("input", "");
  const std::string en = cfg.get("enumeration", "reachable");
  if (en != "reachable" && en != "full") bad_value("enumeration", en, "reachable or full");
  const Enumeration mode = en == "full" ? Enumeration::full : Enumeration::reachable;
  const ConfigGraph g = build_config_graph(tm, input, mode);
  const int tail = cfg.get_int("tail", g.size());
  const ModifiedGraph mg = modify_graph(g, tail);
  const AtaSpectrum sp = ata_spectrum(mg);
  const SparseHermitian ata = mg.adjacency_gram();
  if (cfg.has("edges")) {
    std::ostringstream os;
    write_edges(os, mg);
    write_output(cfg, "edges", os.str());
  }

  const char* outcome = g.outcome == Outcome::accept ? "accept" : g.outcome == Outcome::reject ? "reject" : "undecided";
  ctx.stats["vertices"] = g.size();
  ctx.stats["edges"] = g.edges.size();
  ctx.stats["tail"] = tail;
  ctx.stats["outcome"] = outcome;
  ctx.stats["E1"] = sp.e1;
  ctx.stats["gap"] = sp.gap;
  ctx.stats["longest_block"] = sp.longest_block;
  ctx.stats["cycle_length"] = sp.cycle_length;

  if (g.outcome == Outcome::accept) {
    const int l = g.accept_path_edges;
    const double want = 4.0 * std::pow(std::sin(std::numbers::pi / (4.0 * l + 2.0)), 2);
    ctx.stats["ell"] = l;
    ctx.bounds["yes_E1"] = want;
    ctx.checks.add("yes_E1_closed_form", std::abs(sp.e1 - want) <= 1e-10, std::abs(sp.e1 - want), 1e-10);
    const std::vector<int> sizes = component_sizes(mg);
    bool unique = true;
    for (std::size_t i = 1; i < sizes.size(); ++i) unique = unique && sizes[i] < sizes[0];
    ctx.checks.add("unique_longest_subgraph", unique, sizes[0], g.size());
  } else {
    const double bound = kGapFitConstant * std::pow(static_cast<double>(sp.longest_block), -4.0);
    ctx.stats["l_max"] = sp.longest_block;
    ctx.bounds["gap_fit"] = bound;
    ctx.checks.add("no_zero_eigenvalue", std::abs(sp.e1) <= 1e-12, sp.e1, 1e-12);
    ctx.checks.add("no_gap_bound", sp.gap >= bound, sp.gap, bound);
  }

  bool entries_ok = true;
  for (std::size_t v = 0; v < ata.dim(); ++v)
    for (const auto& e : ata.row(v)) entries_ok = entries_ok && (e.value == cplx(1.0) || e.value == cplx(2.0));
  ctx.checks.add("row_sparsity", ata.row_sparsity() <= 3, static_cast<double>(ata.row_sparsity()), 3);
  ctx.checks.add("entries_in_range", entries_ok, entries_ok ? 1.0 : 0.0, 1.0);

  const std::uint64_t cap = static_cast<std::uint64_t>(cfg.get_int("oracle_cap", 4096));
  const ConfigSpace space(tm);
  if (space.count() <= cap) {
    const ModifiedGraph full = modify_graph(build_config_graph(tm, input, Enumeration::full), tail);
    const SparseHermitian dense = full.adjacency_gram();
    const AtaOracle oracle(tm, input, tail);
    std::size_t mismatches = 0;
    for (int v = 0; v < full.size(); ++v) {
      const auto row = oracle.row(static_cast<std::uint64_t>(v));
      bool same = row.size() == dense.row(v).size();
      for (const auto& [col, value] : row) same = same && dense.entry(v, col) == cplx(value);
      mismatches += same ? 0 : 1;
    }
    ctx.checks.add("oracle_matches_matrix", mismatches == 0, static_cast<double>(mismatches), 0);
  } else {
    ctx.checks.skip("oracle_matches_matrix", "configuration count above oracle_cap");
  }
}

void run_sw(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  const std::string mode = cfg.get("mode", "random");
  CMatrix h0, h1;
  if (mode == "random") {
    const int dim = cfg.get_int("random.dim", 8);
    const int r = cfg.get_int("random.ground_rank", 2);
    if (dim < 2 || r < 1 || r >= dim) bad_value("random.ground_rank", std::to_string(r), "in [1, dim)");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RVector e(dim);
    for (int i = 0; i < dim; ++i) e(i) = i < r ? 0.0 : 1.0 + u(ctx.rng);
    const CMatrix v = random_unitary(ctx.rng, dim);
    h0 = v * e.cast<cplx>().asDiagonal() * v.adjoint();
    h0 = (h0 + h0.adjoint()) * 0.5;
    const CMatrix x = random_hermitian(ctx.rng, dim);
    h1 = x * (cfg.get_double("random.eps_ratio", 1.0 / 64) / operator_norm(x));
  } else if (mode == "clock") {
    if (!cfg.has("circuit")) throw std::invalid_argument("sw-check: mode = clock needs circuit = <path>");
    const VerifierCircuit circuit = load_circuit(cfg.path("circuit").string());
    const double d0 = unperturbed_gap(build_clock(circuit, 1.0));
    const ClockHamiltonian clock = build_clock(circuit, d0 * cfg.get_double("epsilon_ratio", 1.0 / 160));
    h0 = clock.unperturbed();
    h1 = clock.h_output;
  } else {
    bad_value("mode", mode, "random or clock");
  }
  const PerturbationSplit split = make_split(h0, h1);
  const int r = static_cast<int>(split.ground_basis.cols());
  const RVector exact = hermitian_eigenvalues(h0 + h1);
  const EffectiveHamiltonian o1 = effective_hamiltonian(split, 1);
  const EffectiveHamiltonian o2 = effective_hamiltonian(split, 2);
  double err1 = 0, err2 = 0;
  for (int i = 0; i < r; ++i) {
    err1 = std::max(err1, std::abs(exact(i) - o1.eigenvalues(i)));
    err2 = std::max(err2, std::abs(exact(i) - o2.eigenvalues(i)));
  }
  const CMatrix p = low_energy_projector(split);
  const CMatrix u = sw_unitary(split.p0, p);
  const double intertwine = max_abs(u * p * u.adjoint() - split.p0);
  const double bound = truncation_error_bound(split.h1_norm, split.delta);

  ctx.stats["dimension"] = h0.rows();
  ctx.stats["ground_rank"] = r;
  ctx.stats["delta"] = split.delta;
  ctx.stats["h1_norm"] = split.h1_norm;
  ctx.stats["order1_error"] = err1;
  ctx.stats["order2_error"] = err2;
  ctx.stats["intertwining_error"] = intertwine;
  ctx.stats["unitarity_defect"] = unitarity_defect(u);
  ctx.bounds["truncation"] = bound;
  ctx.checks.add("order1_within_bound", err1 <= bound, err1, bound);
  ctx.checks.add("intertwining", intertwine <= 1e-9, intertwine, 1e-9);
  ctx.checks.add("unitarity", unitarity_defect(u) <= 1e-12, unitarity_defect(u), 1e-12);
}

void run_transforms(Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  const VerifierCircuit circuit = cfg.has("circuit") ? load_circuit(cfg.path("circuit").string())
                                                     : random_dyadic_verifier(ctx.rng, cfg.get_int("random.w", 2));
  PromiseParams p = promise_from(cfg, 0.9, 0.3, 0.4, 0.0, circuit.w);
  const int pf = cfg.get_int("poly_factor", 4);

  // flag qubit: original spectrum, one level at s + (c - s)/pf, 2^w - 1 zeros
  const AcceptOperator q = accept_operator(circuit);
  const AcceptOperator fq = accept_operator(flag_qubit_transform(circuit, p, pf));
  std::vector<double> want(q.eigenvalues.data(), q.eigenvalues.data() + q.eigenvalues.size());
  want.push_back(p.s + (p.c - p.s) / pf);
  want.resize(want.size() + (std::size_t{1} << circuit.w) - 1, 0.0);
  std::vector<double> got(fq.eigenvalues.data(), fq.eigenvalues.data() + fq.eigenvalues.size());
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  double union_dev = got.size() == want.size() ? 0.0 : 1.0;
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i)
    union_dev = std::max(union_dev, std::abs(got[i] - want[i]));

  // distinct probabilities on basis witnesses
  const int e = cfg.get_int("reject_exponent", min_reject_exponent(circuit, p));
  const AcceptOperator dq = accept_operator(distinct_prob_transform(circuit, p, e));
  std::vector<double> probs;
  for (Eigen::Index i = 0; i < dq.q.rows(); ++i) probs.push_back(dq.q(i, i).real());
  std::sort(probs.begin(), probs.end());
  double min_gap = 1.0;
  for (std::size_t i = 1; i < probs.size(); ++i) min_gap = std::min(min_gap, probs[i] - probs[i - 1]);
  const double literal = std::ldexp(1.0, -e);

  // UQCMA schedule coverage on random gapped pairs
  const int pairs = cfg.get_int("pairs", 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int covered = 0, covered_upper = 0, upper = 0;
  for (int i = 0; i < pairs; ++i) {
    const double c = 0.1 + 0.5 * u(ctx.rng), g1 = 0.2 + 0.3 * u(ctx.rng);
    const double l1 = c + (1.0 - c) * u(ctx.rng);
    const double l2 = std::max(0.0, l1 - g1) * u(ctx.rng);
    bool hit = false;
    for (const QueryPair& qp : uqcma_query_schedule(c, g1)) hit = hit || (l1 >= qp.c && l2 <= qp.s);
    covered += hit;
    if (l1 >= c + g1 / 2) {
      ++upper;
      covered_upper += hit;
    }
  }

  // postQMA margin against the stated region and the derived condition
  const int top = cfg.get_int("postqma_max", 10);
  int region_mismatch = 0, derived_mismatch = 0, points = 0;
  for (int w = 1; w <= top; ++w)
    for (int t = 0; t <= top; ++t)
      for (int uu = 1; uu <= top; ++uu) {
        const bool positive = postqma_margin(w, t, uu) > 0;
        region_mismatch += positive != (uu > w + 1 && t > 1);
        derived_mismatch += positive != (1.0 - std::ldexp(1.0, -t) > std::ldexp(1.0, w - uu));
        ++points;
      }

  ctx.stats["w"] = circuit.w;
  ctx.stats["T"] = circuit.T();
  ctx.stats["flag_union_deviation"] = union_dev;
  ctx.stats["reject_exponent"] = e;
  ctx.stats["distinct_min_gap"] = min_gap;
  ctx.stats["uqcma_pairs"] = pairs;
  ctx.stats["uqcma_covered"] = covered;
  ctx.stats["uqcma_upper_pairs"] = upper;
  ctx.stats["uqcma_upper_covered"] = covered_upper;
  ctx.stats["postqma_points"] = points;
  ctx.stats["postqma_region_mismatches"] = region_mismatch;
  ctx.stats["postqma_derived_mismatches"] = derived_mismatch;
  ctx.bounds["distinct_literal"] = literal;
  ctx.checks.add("flag_spectrum_union", union_dev <= 1e-10, union_dev, 1e-10);
  ctx.checks.add("distinct_pairwise", min_gap > 1e-14, min_gap, 1e-14);
  ctx.checks.add("distinct_min_gap", min_gap >= literal * (1 - 1e-9), min_gap, literal);
  ctx.checks.add("uqcma_coverage", covered == pairs, covered, pairs);
  ctx.checks.add("uqcma_coverage_above_half_gap", covered_upper == upper, covered_upper, upper);
  ctx.checks.add("postqma_region", region_mismatch == 0, region_mismatch, 0);
  ctx.checks.add("postqma_derived_condition", derived_mismatch == 0, derived_mismatch, 0);
}

}  // namespace

std::string ScenarioConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ScenarioConfig::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(it->second, &used);
  } catch (const std::exception&) {
    bad_value(key, it->second, "a number");
  }
  if (used != it->second.size() || !std::isfinite(x)) bad_value(key, it->second, "a number");
  return x;
}

int ScenarioConfig::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::size_t used = 0;
  int x = 0;
  try {
    x = std::stoi(it->second, &used);
  } catch (const std::exception&) {
    bad_value(key, it->second, "an integer");
  }
  if (used != it->second.size()) bad_value(key, it->second, "an integer");
  return x;
}

bool ScenarioConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  bad_value(key, it->second, "a boolean");
}

fs::path ScenarioConfig::path(const std::string& key) const {
  const fs::path p = get(key, "");
  if (p.empty()) throw std::invalid_argument("config: " + key + " is empty");
  return p.is_absolute() ? p : base_dir / p;
}

ScenarioConfig parse_config(std::istream& is, const fs::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      cfg.values[key] = node.data();
    } else {
      for (const auto& [sub, leaf] : node) {
        if (!leaf.empty()) throw std::invalid_argument("config: nested section under [" + key + "]");
        cfg.values[key + "." + sub] = leaf.data();
      }
    }
  }
  if (cfg.has("scenario")) {
    cfg.scenario = cfg.values["scenario"];
    cfg.values.erase("scenario");
  }
  if (cfg.has("seed")) {
    const std::string s = cfg.values["seed"];
    std::size_t used = 0;
    try {
      cfg.seed = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || s[0] == '-') bad_value("seed", s, "an unsigned 64-bit integer");
    cfg.values.erase("seed");
  }
  return cfg;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  return parse_config(in, dir);
}

void validate_config(const ScenarioConfig& config) {
  auto it = allowed_keys().find(config.scenario);
  if (it == allowed_keys().end()) throw std::invalid_argument("unknown scenario '" + config.scenario + "'");
  for (const auto& [key, value] : config.values) {
    if (!it->second.count(key))
      throw std::invalid_argument("config: key '" + key + "' is not used by " + config.scenario);
    if (kInputKeys.count(key) && !fs::exists(config.path(key)))
      throw std::invalid_argument("config: " + key + " file " + config.path(key).string() + " does not exist");
  }
  if (config.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  validate_config(config);
  std::string digest_input = "scenario=" + config.scenario + "\nseed=" + std::to_string(config.seed) + "\n";
  for (const auto& [key, value] : config.values) {
    digest_input += key + "=" + value + "\n";
    if (kInputKeys.count(key)) digest_input += read_file(config.path(key));
  }

  Context ctx(config);
  static const std::map<std::string, std::function<void(Context&)>> runners{
      {"clock-spectrum", run_clock}, {"power-decide", run_power}, {"cooling", run_cooling},
      {"phase-est", run_phase},      {"gs-verify", run_gs_verify}, {"tm-graph", run_tm},
      {"sw-check", run_sw},          {"transforms", run_transforms}};
  runners.at(config.scenario)(ctx);

  ScenarioResult res;
  Report& r = res.report;
  r["scenario"] = config.scenario;
  r["inputs_digest"] = "fnv1a64:" + hex64(fnv1a(digest_input));
  r["seed"] = config.seed;
  Report params = Report::object();
  for (const auto& [key, value] : config.values) params[key] = value;
  r["parameters"] = params;
  r["constants"] = {{"sw_truncation", 10.0}, {"taylor_remainder", kTaylorConstant}, {"gap_fit", kGapFitConstant}};
  r["statistics"] = ctx.stats;
  r["bounds"] = ctx.bounds;
  r["invariants"] = ctx.checks.list();
  res.pass = ctx.checks.pass();
  r["status"] = res.pass ? "PASS" : "FAIL";
  return res;
}

std::string report_text(const Report& report) { return report.dump(2) + "\n"; }

namespace {

std::string csv_cell(const Report& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

}  // namespace

std::string emit_table(const std::vector<Report>& reports, const std::vector<std::string>& names) {
  if (names.size() != reports.size()) throw std::invalid_argument("emit_table: one name per report");
  std::ostringstream os;
  os << "report";
  if (reports.empty()) {
    os << '\n';
    return os.str();
  }
  const std::string scenario = reports[0].value("scenario", "");
  std::vector<std::string> columns;
  for (const auto& [key, value] : reports[0].at("statistics").items()) columns.push_back(key);
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string sc = reports[i].value("scenario", "");
    if (sc != scenario)
      throw std::invalid_argument("emit_table: mixed scenarios '" + scenario + "' and '" + sc + "' (" + names[i] + ")");
    os << csv_cell(names[i]);
    const Report& st = reports[i].at("statistics");
    for (const auto& c : columns) os << ',' << (st.contains(c) ? csv_cell(st.at(c)) : std::string());
    os << '\n';
  }
  return os.str();
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace qgap
