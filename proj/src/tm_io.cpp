#include <fstream>
#include <istream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qgap/configgraph.hpp"

namespace qgap {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::invalid_argument("tm line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

}  // namespace

int ReversibleTM::state_index(const std::string& name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("unknown state '" + name + "'");
}

int ReversibleTM::symbol_index(const std::string& name) const {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("unknown symbol '" + name + "'");
}

std::vector<int> ReversibleTM::encode_input(const std::string& input) const {
  if (static_cast<int>(input.size()) > space)
    throw std::invalid_argument("input of length " + std::to_string(input.size()) + " exceeds space bound " +
                                std::to_string(space));
  std::vector<int> tape(space, 0);
  for (std::size_t i = 0; i < input.size(); ++i) tape[i] = symbol_index(std::string(1, input[i]));
  return tape;
}

ReversibleTM parse_tm(std::istream& is) {
  ReversibleTM tm;
  bool in_delta = false, have_states = false, have_alpha = false;
  std::string start, accept, reject;
  std::string accept_config;
  std::size_t accept_config_line = 0;
  std::vector<std::pair<std::size_t, std::string>> rules;
  const std::regex rule_re(R"(\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*\)\s*->\s*\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*,\s*([LRS])\s*\))");
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (in_delta && line.front() == '(') {
      rules.emplace_back(lineno, line);
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) fail(lineno, "expected 'section:' or a rule");
    const std::string key = trim(line.substr(0, colon));
    const std::string val = trim(line.substr(colon + 1));
    in_delta = false;
    if (key == "states") {
      tm.states = words(val);
      have_states = !tm.states.empty();
    } else if (key == "alphabet") {
      tm.alphabet = words(val);
      have_alpha = !tm.alphabet.empty();
      for (const auto& a : tm.alphabet)
        if (a.size() != 1) fail(lineno, "alphabet symbols must be single characters");
    } else if (key == "start") {
      start = val;
    } else if (key == "accept") {
      accept = val;
    } else if (key == "reject") {
      reject = val;
    } else if (key == "space") {
      try {
        tm.space = std::stoi(val);
      } catch (const std::exception&) {
        fail(lineno, "bad space bound");
      }
      if (tm.space < 1) fail(lineno, "space bound must be >= 1");
    } else if (key == "accept_config") {
      accept_config = val;
      accept_config_line = lineno;
    } else if (key == "delta") {
      in_delta = true;
      if (!val.empty()) rules.emplace_back(lineno, val);
    } else {
      fail(lineno, "unknown section '" + key + "'");
    }
  }
  if (!have_states || !have_alpha) throw std::invalid_argument("tm: states: and alphabet: are required");
  if (start.empty() || accept.empty() || reject.empty())
    throw std::invalid_argument("tm: start:, accept: and reject: are required");
  tm.start = tm.state_index(start);
  tm.accept = tm.state_index(accept);
  tm.reject = tm.state_index(reject);
  if (tm.accept == tm.reject) throw std::invalid_argument("tm: accept and reject states must differ");
  for (const auto& [ln, text] : rules) {
    std::smatch m;
    if (!std::regex_match(text, m, rule_re)) fail(ln, "expected (q,a)->(q',a',L|R|S)");
    Rule r;
    int q = 0, a = 0;
    try {
      q = tm.state_index(m[1]);
      a = tm.symbol_index(m[2]);
      r.next_state = tm.state_index(m[3]);
      r.write = tm.symbol_index(m[4]);
    } catch (const std::invalid_argument& e) {
      fail(ln, e.what());
    }
    r.move = m[5] == "L" ? Move::left : m[5] == "R" ? Move::right : Move::stay;
    if (q == tm.accept || q == tm.reject) fail(ln, "halting states cannot have rules");
    if (!tm.delta.emplace(std::make_pair(q, a), r).second) fail(ln, "duplicate rule");
  }
  if (!accept_config.empty()) {
    for (const auto& w : words(accept_config)) {
      if (w.rfind("head=", 0) == 0) {
        try {
          tm.accept_head = std::stoi(w.substr(5));
        } catch (const std::exception&) {
          fail(accept_config_line, "bad head");
        }
        if (*tm.accept_head < 0 || *tm.accept_head >= tm.space) fail(accept_config_line, "head out of range");
      } else if (w.rfind("tape=", 0) == 0) {
        try {
          tm.accept_tape = tm.encode_input(w.substr(5));
        } catch (const std::invalid_argument& e) {
          fail(accept_config_line, e.what());
        }
      } else {
        fail(accept_config_line, "unknown accept_config field '" + w + "'");
      }
    }
  }
  return tm;
}

ReversibleTM load_tm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open tm file " + path);
  return parse_tm(in);
}

}  // namespace qgap
