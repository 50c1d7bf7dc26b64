#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qgap/circuit_io.hpp"
#include "qgap/circuits.hpp"
#include "qgap/random_instances.hpp"

using namespace qgap;

namespace {

CVector basis(int dim, int i) {
  CVector v = CVector::Zero(dim);
  v[i] = 1.0;
  return v;
}

VerifierCircuit make(int m, int w, int decision, std::vector<GateOp> g) {
  VerifierCircuit c;
  c.m = m;
  c.w = w;
  c.decision = decision;
  c.gates = std::move(g);
  return c;
}

std::vector<double> spectrum(const AcceptOperator& a) { return oracle::sorted_desc(a.eigenvalues); }

}  // namespace

TEST_CASE("gates are validated") {
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 0) = 1.1;
  CHECK_THROWS_AS(make_gate("B", bad, {0}), std::invalid_argument);
  CHECK_THROWS_AS(make_gate("X", gates::x(), {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_gate("CNOT", gates::cnot(), {1, 1}), std::invalid_argument);
  for (const CMatrix& g : {gates::h(), gates::t(), gates::tdg(), gates::s(), gates::cz(), gates::cphase(0.3)})
    CHECK(unitarity_defect(g) <= 1e-12);
}

TEST_CASE("apply_circuit basics") {
  auto empty = make(1, 1, 0, {});
  CVector psi = CVector::Zero(4);
  psi << 0.5, cplx(0, 0.5), -0.5, 0.5;
  CHECK((apply_circuit(empty, psi) - psi).norm() == 0.0);

  auto flip = make(2, 0, 0, {X(0)});
  CVector out = apply_circuit(flip, basis(4, 0));
  CHECK(std::abs(out[2] - 1.0) < 1e-15);  // |10>

  CHECK_THROWS_AS(apply_circuit(flip, basis(8, 0)), std::invalid_argument);
  CHECK_THROWS_AS(apply_circuit(flip, 2.0 * basis(4, 0)), std::invalid_argument);
}

TEST_CASE("apply_circuit matches dense gate products") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    VerifierCircuit c = random_circuit(rng, 1, 2, 5);
    CVector psi = random_state(rng, 8);
    const CVector expect = oracle::circuit_matrix(c) * psi;
    const CVector got = apply_circuit(c, psi);
    CHECK((expect - got).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(got.norm() - 1.0) <= 1e-10);
  }
}

TEST_CASE("Toffoli decomposition is exact") {
  VerifierCircuit c = make(3, 0, 2, {});
  append_toffoli(c.gates, 0, 1, 2);
  CMatrix expect = CMatrix::Identity(8, 8);
  expect.block(6, 6, 2, 2) = gates::x();
  CHECK(max_abs(oracle::circuit_matrix(c) - expect) <= 1e-12);
}

TEST_CASE("multi-controlled X returns ancillas clean") {
  // controls 0..3, target 4, ancillas 5,6
  VerifierCircuit c = make(7, 0, 4, {});
  append_mcx(c.gates, {0, 1, 2, 3}, 4, {5, 6});
  for (int in = 0; in < 128; in += 4) {
    const CVector out = apply_circuit(c, basis(128, in));
    int expect = in;
    if ((in >> 3) == 0xF) expect ^= 1 << 2;
    CHECK(std::abs(std::abs(out[expect]) - 1.0) < 1e-10);
  }
}

TEST_CASE("accept_operator examples") {
  auto always = make(1, 1, 0, {X(0)});
  CHECK(max_abs(accept_operator(always).q - CMatrix::Identity(2, 2)) <= 1e-12);

  auto never = make(1, 1, 0, {});
  CHECK(max_abs(accept_operator(never).q) <= 1e-12);

  auto copy = make(1, 1, 0, {CNOT(1, 0)});
  CMatrix expect = CMatrix::Zero(2, 2);
  expect(1, 1) = 1.0;
  CHECK(max_abs(accept_operator(copy).q - expect) <= 1e-12);
  CHECK(max_abs(oracle::accept_matrix(copy) - expect) <= 1e-12);
}

TEST_CASE("accept_operator reports the size cap") {
  auto big = make(10, 5, 0, {});
  try {
    accept_operator(big);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("15 qubits") != std::string::npos);
  }
}

TEST_CASE("accept operator sandwich and eigen-oracle equivalence") {
  Rng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    VerifierCircuit c = random_circuit(rng, 2, 2, 6);
    AcceptOperator a = accept_operator(c);
    CHECK(max_abs(a.q - oracle::accept_matrix(c)) <= 1e-10);
    CHECK(hermiticity_defect(a.q) <= 1e-12);
    for (int k = 0; k < 5; ++k) {
      CVector v = random_state(rng, 4);
      const double quad = (v.adjoint() * a.q * v)(0, 0).real();
      CHECK(quad >= -1e-10);
      CHECK(quad <= 1.0 + 1e-10);
      CHECK(std::abs(quad - accept_probability(c, v)) <= 1e-10);
    }
    for (int i = 0; i < 4; ++i) {
      CVector v = a.eigenvectors.col(i);
      CHECK(std::abs(a.eigenvalues(i) - accept_probability(c, v)) <= 1e-9);
    }
    for (int i = 0; i + 1 < 4; ++i) CHECK(a.eigenvalues(i) >= a.eigenvalues(i + 1));
  }
}

TEST_CASE("classical_witness_extend") {
  SUBCASE("diagonal operator preserved") {
    auto copy = make(1, 1, 0, {CNOT(1, 0)});
    AcceptOperator before = accept_operator(copy);
    AcceptOperator after = accept_operator(classical_witness_extend(copy));
    CHECK(max_abs(before.q - after.q) <= 1e-12);
  }
  SUBCASE("Hadamard verifier becomes diagonal") {
    auto had = make(1, 1, 0, {H(1), CNOT(1, 0)});
    AcceptOperator before = accept_operator(had);
    AcceptOperator after = accept_operator(classical_witness_extend(had));
    CHECK(std::abs(before.q(0, 1)) > 0.1);
    CHECK(std::abs(after.q(0, 1)) <= 1e-10);
    for (int x = 0; x < 2; ++x) CHECK(std::abs(after.q(x, x) - before.q(x, x)) <= 1e-12);
  }
  SUBCASE("random circuits keep basis-witness probabilities") {
    Rng rng(17);
    for (int trial = 0; trial < 3; ++trial) {
      VerifierCircuit c = random_circuit(rng, 2, 2, 6);
      AcceptOperator before = accept_operator(c);
      AcceptOperator after = accept_operator(classical_witness_extend(c));
      double maxdiag = 0.0;
      for (int x = 0; x < 4; ++x) {
        CHECK(std::abs(after.q(x, x) - before.q(x, x)) <= 1e-12);
        maxdiag = std::max(maxdiag, before.q(x, x).real());
        for (int y = 0; y < 4; ++y)
          if (x != y) CHECK(std::abs(after.q(x, y)) <= 1e-10);
      }
      CHECK(after.lambda1() <= maxdiag + 1e-10);
    }
  }
}

TEST_CASE("flag_qubit_transform") {
  PromiseParams p;
  p.c = 1.0;
  p.s = 0.0;
  SUBCASE("spectrum example") {
    auto copy = make(1, 1, 0, {CNOT(1, 0), X(1), X(1)});
    CHECK(spectrum(accept_operator(copy)) == std::vector<double>{1.0, 0.0});
    auto out = flag_qubit_transform(classical_witness_extend(copy), p, 4);
    CHECK(out.w == 2);
    auto s = spectrum(accept_operator(out));
    const std::vector<double> expect{1.0, 0.25, 0.0, 0.0};
    REQUIRE(s.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s[i] - expect[i]) <= 1e-10);
  }
  SUBCASE("NO case gap") {
    auto never = make(1, 1, 0, {});
    PromiseParams q;
    q.c = 0.75;
    q.s = 0.25;
    auto s = spectrum(accept_operator(flag_qubit_transform(never, q, 3)));
    CHECK(s[0] - s[1] >= (q.c - q.s) * (1.0 - 1.0 / 3.0) - 1e-10);
  }
  SUBCASE("large poly factor") {
    auto never = make(1, 1, 0, {});
    PromiseParams q;
    q.c = 0.9;
    q.s = 0.3;
    auto s = spectrum(accept_operator(flag_qubit_transform(never, q, 1000000)));
    CHECK(std::abs(s[0] - (0.3 + 0.6e-6)) <= 1e-12);
  }
  SUBCASE("poly factor below 2 rejected") {
    auto never = make(1, 1, 0, {});
    CHECK_THROWS_AS(flag_qubit_transform(never, p, 1), std::invalid_argument);
  }
  SUBCASE("spectrum union on random circuits") {
    Rng rng(23);
    for (auto [m, w] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 3}, {4, 2}}) {
      VerifierCircuit c = random_circuit(rng, m, w, 5);
      PromiseParams q;
      q.c = 0.8;
      q.s = 0.2;
      AcceptOperator before = accept_operator(c);
      AcceptOperator after = accept_operator(flag_qubit_transform(c, q, 5), 16);
      std::vector<double> expect = oracle::sorted_desc(before.eigenvalues);
      expect.push_back(0.2 + 0.6 / 5);
      for (int i = 1; i < (1 << w); ++i) expect.push_back(0.0);
      std::sort(expect.rbegin(), expect.rend());
      auto got = spectrum(after);
      REQUIRE(got.size() == expect.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) <= 1e-10);
    }
  }
}

TEST_CASE("distinct_prob_transform") {
  PromiseParams p;
  p.c = 1.0;
  p.s = 0.0;
  auto always = make(1, 2, 0, {X(0)});
  SUBCASE("all-accept example") {
    auto out = distinct_prob_transform(always, p, 8);
    AcceptOperator a = accept_operator(out);
    for (int y = 0; y < 4; ++y) CHECK(std::abs(a.q(y, y).real() - (1.0 - y / 256.0)) <= 1e-12);
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z)
        if (y != z) CHECK(std::abs(a.q(y, z)) <= 1e-12);
  }
  SUBCASE("precondition reports the minimum") {
    try {
      distinct_prob_transform(always, p, 2);
      FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("minimum 3") != std::string::npos);
    }
  }
  SUBCASE("dyadic verifiers become pairwise distinct") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
      VerifierCircuit c = random_dyadic_verifier(rng, 2);
      PromiseParams q;
      q.c = 0.75;
      q.s = 0.25;
      AcceptOperator before = accept_operator(c);
      const int e = min_reject_exponent(c, q);
      AcceptOperator after = accept_operator(distinct_prob_transform(c, q, e));
      std::set<double> seen;
      for (int y = 0; y < 4; ++y) {
        const double expect = before.q(y, y).real() * (1.0 - std::ldexp(static_cast<double>(y), -e));
        CHECK(std::abs(after.q(y, y).real() - expect) <= 1e-12);
        CHECK(before.q(y, y).real() > 0.0);
      }
      for (int y = 0; y < 4; ++y)
        for (int z = y + 1; z < 4; ++z) CHECK(after.q(y, y).real() != after.q(z, z).real());
      CHECK(std::abs(after.q(0, 0) - before.q(0, 0)) <= 1e-12);
    }
  }
}

TEST_CASE("uqcma_query_schedule") {
  auto s = uqcma_query_schedule(0.5, 0.5);
  REQUIRE(s.size() == 9);
  CHECK(s[0].c == doctest::Approx(0.75));
  CHECK(s[0].s == doctest::Approx(0.5));
  for (const auto& q : s) CHECK(q.c - q.s == doctest::Approx(0.25));
  CHECK(uqcma_query_schedule(0.9, 1.0).size() == 21);
  CHECK_THROWS_AS(uqcma_query_schedule(0.5, 0.0), std::invalid_argument);

  // covered whenever lambda1 >= c + g1/2
  auto covered = [](const std::vector<QueryPair>& sched, double l1, double l2) {
    for (const auto& q : sched)
      if (l1 >= q.c && l2 <= q.s) return true;
    return false;
  };
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double c = 0.1 + 0.5 * u(rng), g1 = 0.2 + 0.3 * u(rng);
    const auto sched = uqcma_query_schedule(c, g1);
    const double l1 = c + g1 / 2 + (1.0 - c - g1 / 2) * u(rng);
    const double l2 = std::max(0.0, l1 - g1) * u(rng);
    CHECK(covered(sched, l1, l2));
  }
  // lambda1 = c is never covered
  CHECK_FALSE(covered(s, 0.5, 0.0));
}

TEST_CASE("circuit file round trip") {
  Rng rng(2);
  VerifierCircuit c = random_circuit(rng, 1, 2, 4);
  c.gates.push_back(CNOT(0, 2));
  c.gates.push_back(T(1));
  std::stringstream ss;
  write_circuit(ss, c);
  VerifierCircuit back = parse_circuit(ss);
  CHECK(back.m == 1);
  CHECK(back.w == 2);
  REQUIRE(back.gates.size() == c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) CHECK(max_abs(back.gates[i].matrix - c.gates[i].matrix) == 0.0);
}

TEST_CASE("circuit parser errors carry line numbers") {
  auto err = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_circuit(in);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(err("m=1 w=1 decision=0\nGATE X targets=0\nGATE Q targets=1\n").find("line 3") != std::string::npos);
  CHECK(err("m=1 w=1 decision=0\nGATE X targets=a\n").find("line 2") != std::string::npos);
  CHECK(err("m=1 w=1 decision=0\nGATE U targets=0 matrix=1,0,0,0\n").find("line 2") != std::string::npos);
  CHECK(err("GATE X targets=0\n").find("line 1") != std::string::npos);
  CHECK(err("m=1 w=1 decision=0\nGATE U targets=0 matrix=2,0,0,0,0,0,1,0\n").find("not unitary") != std::string::npos);
}
