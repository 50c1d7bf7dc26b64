#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qgap/clock.hpp"
#include "qgap/random_instances.hpp"
#include "qgap/schrieffer_wolff.hpp"

using namespace qgap;

namespace {

VerifierCircuit make(int m, int w, int decision, std::vector<GateOp> g) {
  VerifierCircuit c;
  c.m = m;
  c.w = w;
  c.decision = decision;
  c.gates = std::move(g);
  return c;
}

GateOp ident(int q) { return make_gate("I", CMatrix::Identity(2, 2), {q}); }

double energy(const CMatrix& h, const CVector& v) { return (v.adjoint() * h * v)(0, 0).real(); }

int count_below(const RVector& e, double tol) {
  int k = 0;
  for (Eigen::Index i = 0; i < e.size(); ++i) k += e(i) < tol;
  return k;
}

}  // namespace

TEST_CASE("one-gate identity circuit has the expected history state") {
  auto c = make(1, 0, 0, {ident(0)});
  ClockHamiltonian h = build_clock(c, 0.0);
  EigenPairs ep = hermitian_eigen(h.total());
  CHECK(std::abs(ep.values(0)) <= 1e-10);
  CHECK(ep.values(1) > 1e-3);
  CVector expect = CVector::Zero(h.dim());
  expect[0] = expect[1] = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(expect.dot(ep.vectors.col(0))) - 1.0) <= 1e-10);
}

TEST_CASE("components satisfy their invariants") {
  Rng rng(1);
  auto c = random_circuit(rng, 2, 1, 3);
  for (auto enc : {ClockEncoding::ideal, ClockEncoding::unary}) {
    ClockHamiltonian h = build_clock(c, 0.01, enc);
    CHECK(std::abs(operator_norm(h.h_output) - 0.01) <= 1e-12);
    CHECK(hermiticity_defect(h.total()) <= 1e-12);
    CHECK(hermitian_eigenvalues(h.h_input).minCoeff() >= -1e-10);
    CHECK(hermitian_eigenvalues(h.h_prop).minCoeff() >= -1e-10);
    CHECK(hermitian_eigenvalues(h.h_clock).minCoeff() >= -1e-10);
    if (enc == ClockEncoding::ideal) CHECK(max_abs(h.h_clock) == 0.0);
  }
}

TEST_CASE("eps = 0 kernel is the history-state span") {
  Rng rng(2);
  for (int trial = 0; trial < 4; ++trial) {
    const int w = 1 + trial % 2;
    auto c = random_circuit(rng, 2, w, 2 + trial);
    for (auto enc : {ClockEncoding::ideal, ClockEncoding::unary}) {
      ClockHamiltonian h = build_clock(c, 0.0, enc);
      const RVector e = hermitian_eigenvalues(h.total());
      CHECK(count_below(e, 1e-8) == (1 << w));
      CHECK(unperturbed_gap(h) > 1e-6);
      for (int k = 0; k < 3; ++k) {
        HistoryState hs = history_state(c, random_state(rng, 1 << w), enc);
        CHECK(std::abs(energy(h.total(), hs.vector)) <= 1e-10);
      }
      ClockHamiltonian nw = build_clock(c, 0.0, enc, WitnessMode::no_witness);
      CHECK(count_below(hermitian_eigenvalues(nw.total()), 1e-8) == 1);
    }
  }
}

TEST_CASE("accept-always circuit has zero ground energy") {
  auto c = make(1, 1, 0, {X(0)});
  ClockHamiltonian h = build_clock(c, 1e-4);
  CHECK(std::abs(hermitian_eigenvalues(h.total())(0)) <= 1e-10);
}

TEST_CASE("history state energy identity") {
  SUBCASE("accept always") {
    auto c = make(1, 1, 0, {X(0), H(1)});
    ClockHamiltonian h = build_clock(c, 1e-3);
    Rng rng(4);
    CHECK(std::abs(energy(h.total(), history_state(c, random_state(rng, 2)).vector)) <= 1e-10);
  }
  SUBCASE("reject always, T = 3") {
    auto c = make(1, 1, 0, {Z(0), H(1), Z(0)});
    ClockHamiltonian h = build_clock(c, 1e-3);
    Rng rng(5);
    CHECK(std::abs(energy(h.total(), history_state(c, random_state(rng, 2)).vector) - 1e-3 / 4) <= 1e-12);
  }
  SUBCASE("random witnesses") {
    Rng rng(6);
    auto c = random_circuit(rng, 2, 2, 4);
    const CMatrix q = oracle::accept_matrix(c);
    for (double eps : {0.0, 1e-3, 0.05}) {
      ClockHamiltonian h = build_clock(c, eps);
      for (int k = 0; k < 10; ++k) {
        CVector phi = random_state(rng, 4);
        const double expect = eps * (1.0 - (phi.adjoint() * q * phi)(0, 0).real()) / (c.T() + 1);
        CHECK(std::abs(energy(h.total(), history_state(c, phi).vector) - expect) <= 1e-10);
      }
    }
  }
  SUBCASE("dimension mismatch") {
    auto c = make(1, 1, 0, {X(0)});
    CHECK_THROWS_AS(history_state(c, CVector::Ones(4) / 2.0), std::invalid_argument);
  }
}

TEST_CASE("unary encoding rejects T = 0") {
  auto c = make(1, 1, 0, {});
  CHECK_THROWS_AS(build_clock(c, 0.0, ClockEncoding::unary), std::invalid_argument);
  CHECK_NOTHROW(build_clock(c, 0.0, ClockEncoding::ideal));
}

TEST_CASE("unary low spectrum equals ideal low spectrum") {
  Rng rng(7);
  auto c = random_circuit(rng, 1, 1, 3);
  const RVector a = hermitian_eigenvalues(build_clock(c, 0.01).total());
  const RVector b = hermitian_eigenvalues(build_clock(c, 0.01, ClockEncoding::unary).total());
  for (int i = 0; i < 4; ++i) CHECK(std::abs(a(i) - b(i)) <= 1e-10);
}

TEST_CASE("predicted_spectrum") {
  auto c = make(1, 1, 0, {CNOT(1, 0), Z(1), Z(1)});
  AcceptOperator q = accept_operator(c);
  ClockHamiltonian h = build_clock(c, 1e-4);
  auto p = predicted_spectrum(h, q);
  REQUIRE(p.size() == 2);
  CHECK(std::abs(p[0]) <= 1e-15);
  CHECK(std::abs(p[1] - 2.5e-5) <= 1e-15);

  auto zero = predicted_spectrum(build_clock(c, 0.0), q);
  for (double x : zero) CHECK(x == 0.0);

  AcceptOperator degenerate = make_accept_operator(CMatrix::Identity(2, 2) * 0.5);
  auto d = predicted_spectrum(h, degenerate);
  CHECK(d[0] == d[1]);

  ClockHamiltonian strong = build_clock(c, 0.5);
  CHECK_THROWS_AS(predicted_spectrum(strong, q), std::invalid_argument);
}

TEST_CASE("perturbative tracking and gap inheritance") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    auto c = random_circuit(rng, 2, 2, 3 + trial % 3);
    ClockHamiltonian h0 = build_clock(c, 0.0);
    const double d0 = unperturbed_gap(h0);
    const double eps = d0 / 160.0;
    ClockHamiltonian h = build_clock(c, eps);
    AcceptOperator q = accept_operator(c);
    auto pred = predicted_spectrum(h, q, d0);
    const RVector e = hermitian_eigenvalues(h.total());
    for (std::size_t i = 0; i < pred.size(); ++i) CHECK(std::abs(e(i) - pred[i]) <= 10.0 * eps * eps / d0);
    const double inherited = eps * q.gap() / (c.T() + 1);
    CHECK(std::abs((e(1) - e(0)) - inherited) <= 20.0 * eps * eps / d0);
  }
}

TEST_CASE("first-order Schrieffer-Wolff reproduces the predictions") {
  Rng rng(9);
  auto c = random_circuit(rng, 1, 2, 3);
  ClockHamiltonian h0 = build_clock(c, 0.0);
  const double d0 = unperturbed_gap(h0);
  ClockHamiltonian h = build_clock(c, d0 / 32.0);
  PerturbationSplit split = make_split(h.unperturbed(), h.h_output, 1e-8);
  EffectiveHamiltonian eff = effective_hamiltonian(split, 1);
  auto pred = predicted_spectrum(h, accept_operator(c), d0);
  REQUIRE(static_cast<std::size_t>(eff.eigenvalues.size()) == pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) CHECK(std::abs(eff.eigenvalues(i) - pred[i]) <= 1e-10);
}

TEST_CASE("no-witness gap scaling") {
  std::vector<double> lt, lg;
  for (int T = 2; T <= 8; ++T) {
    VerifierCircuit c = make(2, 0, 0, {});
    for (int t = 0; t < T; ++t) c.gates.push_back(t % 2 ? CNOT(0, 1) : H(0));
    const double d0 = unperturbed_gap(build_clock(c, 0.0, ClockEncoding::ideal, WitnessMode::no_witness));
    CHECK(d0 > 0.0);
    lt.push_back(std::log(T));
    lg.push_back(std::log(d0));
  }
  const double n = static_cast<double>(lt.size());
  const double mx = std::accumulate(lt.begin(), lt.end(), 0.0) / n, my = std::accumulate(lg.begin(), lg.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    sxy += (lt[i] - mx) * (lg[i] - my);
    sxx += (lt[i] - mx) * (lt[i] - mx);
  }
  CHECK(sxy / sxx >= -3.5);
}

TEST_CASE("epsilon_schedule") {
  PromiseParams p;
  p.c = 0.6;
  p.s = 0.5;
  p.g1 = p.g2 = 0.1;
  CHECK(epsilon_schedule(p, 2, 2, EpsilonRegime::egqma) == doctest::Approx(3.125e-3).epsilon(1e-12));
  PromiseParams q;
  q.c = 0.75;
  q.s = 0.25;
  CHECK(epsilon_schedule(q, 10, 3, EpsilonRegime::gs_description) == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK(epsilon_schedule(q, 10, 3, EpsilonRegime::bqp_hard) == doctest::Approx(5e-5 / 3).epsilon(1e-12));
  PromiseParams z;
  z.c = z.s = 0.5;
  CHECK(epsilon_schedule(z, 3, 1, EpsilonRegime::bqp_hard) == 0.0);
}

TEST_CASE("coo export round trip") {
  Rng rng(10);
  auto c = random_circuit(rng, 1, 1, 2);
  SparseHermitian s = SparseHermitian::from_dense(build_clock(c, 0.01).total(), 0.0);
  std::stringstream ss;
  s.write_coo(ss);
  const std::string text = ss.str();
  CHECK(text.rfind("dim=12 fields=coo\n", 0) == 0);
  SparseHermitian back = SparseHermitian::read_coo(ss);
  CHECK(max_abs(back.to_dense() - s.to_dense()) == 0.0);
  std::istringstream bad("dim=2 fields=coo\n0 5 1 0\n");
  CHECK_THROWS_WITH_AS(SparseHermitian::read_coo(bad), doctest::Contains("line 2"), std::invalid_argument);
}
