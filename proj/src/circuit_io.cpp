#include "qgap/circuit_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgap {

namespace {

const std::map<std::string, CMatrix (*)()>& builtins() {
  static const std::map<std::string, CMatrix (*)()> table = {
      {"H", gates::h},   {"X", gates::x},       {"Z", gates::z},       {"S", gates::s},
      {"T", gates::t},   {"TDG", gates::tdg},   {"CNOT", gates::cnot}, {"CZ", gates::cz},
  };
  return table;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::invalid_argument("circuit line " + std::to_string(line) + ": " + msg);
}

int parse_int(const std::string& s, std::size_t line, const std::string& what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    fail(line, "bad integer for " + what + ": '" + s + "'");
  }
  if (pos != s.size()) fail(line, "bad integer for " + what + ": '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

VerifierCircuit parse_circuit(std::istream& is) {
  VerifierCircuit c;
  bool seen_m = false, seen_w = false, seen_d = false;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    if (tok == "GATE") {
      if (!(seen_m && seen_w && seen_d)) fail(lineno, "GATE before header m=, w=, decision=");
      std::string label;
      if (!(ss >> label)) fail(lineno, "missing gate label");
      std::vector<int> targets;
      CMatrix matrix;
      bool has_matrix = false;
      while (ss >> tok) {
        if (tok.rfind("targets=", 0) == 0) {
          for (const auto& t : split(tok.substr(8), ',')) targets.push_back(parse_int(t, lineno, "target"));
        } else if (tok.rfind("matrix=", 0) == 0) {
          std::vector<double> vals;
          for (const auto& t : split(tok.substr(7), ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
              v = std::stod(t, &pos);
            } catch (const std::exception&) {
              fail(lineno, "bad matrix entry '" + t + "'");
            }
            if (pos != t.size()) fail(lineno, "bad matrix entry '" + t + "'");
            vals.push_back(v);
          }
          int d = 0;
          if (vals.size() == 8)
            d = 2;
          else if (vals.size() == 32)
            d = 4;
          else
            fail(lineno, "matrix needs 4 or 16 re,im pairs, got " + std::to_string(vals.size()) + " numbers");
          matrix.resize(d, d);
          for (int r = 0; r < d; ++r)
            for (int k = 0; k < d; ++k) matrix(r, k) = cplx(vals[2 * (r * d + k)], vals[2 * (r * d + k) + 1]);
          has_matrix = true;
        } else {
          fail(lineno, "unknown gate field '" + tok + "'");
        }
      }
      if (targets.empty()) fail(lineno, "missing targets=");
      if (!has_matrix) {
        auto it = builtins().find(label);
        if (it == builtins().end()) fail(lineno, "gate '" + label + "' is not built in and has no matrix=");
        matrix = it->second();
      }
      try {
        c.gates.push_back(make_gate(label, matrix, targets));
      } catch (const std::invalid_argument& e) {
        fail(lineno, e.what());
      }
      continue;
    }
    do {
      auto eq = tok.find('=');
      if (eq == std::string::npos) fail(lineno, "unexpected token '" + tok + "'");
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "m") {
        c.m = parse_int(val, lineno, "m");
        seen_m = true;
      } else if (key == "w") {
        c.w = parse_int(val, lineno, "w");
        seen_w = true;
      } else if (key == "decision") {
        c.decision = parse_int(val, lineno, "decision");
        seen_d = true;
      } else {
        fail(lineno, "unknown header key '" + key + "'");
      }
    } while (ss >> tok);
  }
  if (!(seen_m && seen_w && seen_d)) throw std::invalid_argument("circuit: header needs m=, w= and decision=");
  c.validate(64);
  return c;
}

VerifierCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open circuit file " + path);
  return parse_circuit(in);
}

void write_circuit(std::ostream& os, const VerifierCircuit& c) {
  os << "m=" << c.m << " w=" << c.w << " decision=" << c.decision << '\n';
  os << std::setprecision(17);
  for (const auto& g : c.gates) {
    os << "GATE " << g.label << " targets=" << g.targets[0];
    if (g.targets.size() > 1) os << ',' << g.targets[1];
    auto it = builtins().find(g.label);
    if (it == builtins().end() || max_abs(it->second() - g.matrix) != 0.0) {
      os << " matrix=";
      for (Eigen::Index r = 0; r < g.matrix.rows(); ++r)
        for (Eigen::Index k = 0; k < g.matrix.cols(); ++k) {
          if (r || k) os << ',';
          os << g.matrix(r, k).real() << ',' << g.matrix(r, k).imag();
        }
    }
    os << '\n';
  }
}

}  // namespace qgap
