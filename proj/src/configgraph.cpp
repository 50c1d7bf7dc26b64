#include "qgap/configgraph.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace qgap {

ConfigSpace::ConfigSpace(const ReversibleTM& tm) : tm_(tm) {
  if (tm.states.empty() || tm.alphabet.empty()) throw std::invalid_argument("ConfigSpace: empty machine");
  const double approx = std::pow(static_cast<double>(tm.alphabet.size()), tm.space) * tm.states.size() * tm.space;
  if (approx > 1e18) throw std::invalid_argument("ConfigSpace: configuration count overflows");
  for (int i = 0; i < tm.space; ++i) tapes_ *= tm.alphabet.size();
  count_ = tapes_ * tm.states.size() * static_cast<std::uint64_t>(tm.space);
}

std::uint64_t ConfigSpace::encode(const Configuration& c) const {
  if (c.state < 0 || c.state >= static_cast<int>(tm_.states.size()) || c.head < 0 || c.head >= tm_.space ||
      static_cast<int>(c.tape.size()) != tm_.space)
    throw std::invalid_argument("ConfigSpace::encode: configuration out of range");
  std::uint64_t t = 0;
  for (int s : c.tape) t = t * tm_.alphabet.size() + static_cast<std::uint64_t>(s);
  return (static_cast<std::uint64_t>(c.state) * tm_.space + c.head) * tapes_ + t;
}

Configuration ConfigSpace::decode(std::uint64_t code) const {
  if (code >= count_) throw std::invalid_argument("ConfigSpace::decode: code out of range");
  Configuration c;
  std::uint64_t t = code % tapes_;
  const std::uint64_t sh = code / tapes_;
  c.head = static_cast<int>(sh % tm_.space);
  c.state = static_cast<int>(sh / tm_.space);
  c.tape.assign(tm_.space, 0);
  for (int i = tm_.space - 1; i >= 0; --i) {
    c.tape[i] = static_cast<int>(t % tm_.alphabet.size());
    t /= tm_.alphabet.size();
  }
  return c;
}

namespace {

int shift(Move m) { return m == Move::left ? -1 : m == Move::right ? 1 : 0; }

}  // namespace

std::optional<std::uint64_t> ConfigSpace::step(std::uint64_t code) const {
  Configuration c = decode(code);
  if (c.state == tm_.accept || c.state == tm_.reject) return std::nullopt;
  auto it = tm_.delta.find({c.state, c.tape[c.head]});
  if (it == tm_.delta.end()) return std::nullopt;
  const Rule& r = it->second;
  const int nh = c.head + shift(r.move);
  if (nh < 0 || nh >= tm_.space) return std::nullopt;
  c.tape[c.head] = r.write;
  c.state = r.next_state;
  c.head = nh;
  return encode(c);
}

std::vector<std::uint64_t> ConfigSpace::predecessors(std::uint64_t code) const {
  const Configuration c = decode(code);
  std::vector<std::uint64_t> out;
  for (const auto& [key, r] : tm_.delta) {
    if (r.next_state != c.state) continue;
    const int h = c.head - shift(r.move);
    if (h < 0 || h >= tm_.space) continue;
    if (c.tape[h] != r.write) continue;
    Configuration p = c;
    p.state = key.first;
    p.head = h;
    p.tape[h] = key.second;
    const std::uint64_t pc = encode(p);
    auto s = step(pc);
    if (s && *s == code) out.push_back(pc);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::string describe(const ConfigSpace& sp, std::uint64_t code) {
  const Configuration c = sp.decode(code);
  std::string s = "(" + sp.tm().states[c.state] + ", head " + std::to_string(c.head) + ", tape ";
  for (int x : c.tape) s += sp.tm().alphabet[x];
  return s + ")";
}

}  // namespace

void check_reversible(const ReversibleTM& tm, std::uint64_t cap) {
  ConfigSpace sp(tm);
  if (sp.count() > cap)
    throw std::invalid_argument("check_reversible: " + std::to_string(sp.count()) +
                                " configurations exceed cap " + std::to_string(cap));
  std::unordered_map<std::uint64_t, std::uint64_t> seen;
  for (std::uint64_t c = 0; c < sp.count(); ++c) {
    auto n = sp.step(c);
    if (!n) continue;
    auto [it, fresh] = seen.emplace(*n, c);
    if (!fresh)
      throw std::invalid_argument("irreversible machine: " + describe(sp, it->second) + " and " + describe(sp, c) +
                                  " both step to " + describe(sp, *n));
  }
}

void ConfigGraph::check_degrees() const {
  std::vector<int> in(vertices.size(), 0), out(vertices.size(), 0);
  for (auto [u, v] : edges) {
    if (++out[u] > 1 || ++in[v] > 1) throw std::domain_error("config graph: vertex degree exceeds 1");
  }
}

namespace {

struct Endpoints {
  std::uint64_t s = 0, t = 0;
  Outcome outcome = Outcome::undecided;
  std::vector<std::uint64_t> forward;
};

Endpoints endpoints(const ConfigSpace& sp, const std::string& input) {
  const ReversibleTM& tm = sp.tm();
  Endpoints e;
  e.s = sp.encode({tm.start, 0, tm.encode_input(input)});
  std::unordered_set<std::uint64_t> seen{e.s};
  e.forward.push_back(e.s);
  std::uint64_t cur = e.s;
  bool cycled = false;
  while (auto n = sp.step(cur)) {
    if (!seen.insert(*n).second) {
      cycled = true;
      break;
    }
    e.forward.push_back(*n);
    cur = *n;
  }
  const int st = sp.decode(cur).state;
  if (!cycled && st == tm.accept) {
    e.outcome = Outcome::accept;
    e.t = cur;
    return e;
  }
  if (!cycled && st == tm.reject) e.outcome = Outcome::reject;
  e.t = sp.encode({tm.accept, tm.accept_head.value_or(0), tm.accept_tape.value_or(tm.encode_input(input))});
  return e;
}

}  // namespace

ConfigGraph build_config_graph(const ReversibleTM& tm, const std::string& input, Enumeration mode,
                               std::uint64_t cap) {
  check_reversible(tm, cap);
  ConfigSpace sp(tm);
  const Endpoints ep = endpoints(sp, input);
  std::vector<std::uint64_t> verts;
  if (mode == Enumeration::full) {
    verts.resize(sp.count());
    for (std::uint64_t c = 0; c < sp.count(); ++c) verts[c] = c;
  } else {
    std::unordered_set<std::uint64_t> set(ep.forward.begin(), ep.forward.end());
    set.insert(ep.t);
    std::uint64_t cur = ep.t;
    for (;;) {
      auto p = sp.predecessors(cur);
      if (p.empty() || !set.insert(p.front()).second) break;
      cur = p.front();
    }
    verts.assign(set.begin(), set.end());
    std::sort(verts.begin(), verts.end());
  }
  ConfigGraph g;
  g.vertices = verts;
  auto index = [&](std::uint64_t code) -> int {
    auto it = std::lower_bound(verts.begin(), verts.end(), code);
    return it != verts.end() && *it == code ? static_cast<int>(it - verts.begin()) : -1;
  };
  for (std::size_t u = 0; u < verts.size(); ++u)
    if (auto n = sp.step(verts[u])) {
      const int v = index(*n);
      if (v >= 0) g.edges.emplace_back(static_cast<int>(u), v);
    }
  g.start = index(ep.s);
  g.accept = index(ep.t);
  g.outcome = ep.outcome;
  if (ep.outcome == Outcome::reject) g.reject = index(ep.forward.back());
  if (ep.outcome == Outcome::accept) g.accept_path_edges = static_cast<int>(ep.forward.size()) - 1;
  g.check_degrees();
  return g;
}

ModifiedGraph modify_graph(const ConfigGraph& g, int tail_length) {
  if (tail_length < 1) throw std::invalid_argument("modify_graph: tail_length must be >= 1");
  if (g.start < 0 || g.accept < 0 || g.start == g.accept)
    throw std::invalid_argument("modify_graph: graph needs distinct s_x and t_x");
  g.check_degrees();
  ModifiedGraph mg;
  mg.base = g;
  mg.tail_length = tail_length;
  const int n = g.size() + tail_length;
  mg.out.assign(n, {});
  mg.self_loop.assign(n, false);
  for (int v = 0; v < g.size(); ++v)
    if (v != g.start && v != g.accept) {
      mg.self_loop[v] = true;
      mg.out[v].push_back(v);
    }
  for (auto [u, v] : g.edges) mg.out[u].push_back(v);
  mg.out[g.accept].push_back(mg.tail_vertex(1));
  for (int i = 1; i < tail_length; ++i) mg.out[mg.tail_vertex(i)].push_back(mg.tail_vertex(i + 1));
  mg.out[mg.tail_vertex(tail_length)].push_back(g.start);
  for (auto& o : mg.out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }
  return mg;
}

SparseHermitian ModifiedGraph::adjacency_gram() const {
  const int n = size();
  std::vector<std::vector<int>> in(n);
  for (int j = 0; j < n; ++j)
    for (int i : out[j]) in[i].push_back(j);
  SparseHermitian s(n);
  for (int j = 0; j < n; ++j)
    for (int i : out[j])
      for (int k : in[i]) s.add(j, k, 1.0);
  s.finalize();
  return s;
}

AtaSpectrum ata_spectrum(const ModifiedGraph& mg, std::size_t block_cap) {
  const SparseHermitian g = mg.adjacency_gram();
  const int n = mg.size();
  AtaSpectrum out;
  std::vector<int> comp(n, -1);
  for (int v = 0; v < n; ++v) {
    if (comp[v] >= 0) continue;
    std::vector<int> members;
    std::queue<int> q;
    q.push(v);
    comp[v] = v;
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      members.push_back(x);
      for (const auto& e : g.row(x))
        if (comp[e.col] < 0) {
          comp[e.col] = v;
          q.push(static_cast<int>(e.col));
        }
    }
    if (members.size() > block_cap)
      throw std::invalid_argument("ata_spectrum: block of size " + std::to_string(members.size()) +
                                  " exceeds dense cap " + std::to_string(block_cap));
    std::sort(members.begin(), members.end());
    const int b = static_cast<int>(members.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b, b);
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j) m(i, j) = g.entry(members[i], members[j]).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    for (int i = 0; i < b; ++i) out.eigenvalues.push_back(es.eigenvalues()(i));
    out.block_sizes.push_back(b);
    out.longest_block = std::max(out.longest_block, b);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.e1 = out.eigenvalues.front();
  out.gap = out.eigenvalues.size() > 1 ? out.eigenvalues[1] - out.eigenvalues[0] : 0.0;

  int cur = mg.base.start, len = 0;
  for (;;) {
    int next = -1;
    for (int i : mg.out[cur])
      if (i != cur) next = i;
    ++len;
    if (next < 0 || len > n) {
      len = 0;
      break;
    }
    if (next == mg.base.start) break;
    cur = next;
  }
  out.cycle_length = len;
  return out;
}

CMatrix block_matrix(BlockType type, int length) {
  if (length < 1) throw std::invalid_argument("block_matrix: length must be >= 1");
  CMatrix m = CMatrix::Zero(length, length);
  for (int i = 0; i < length; ++i) {
    m(i, i) = 2.0;
    if (i + 1 < length) m(i, i + 1) = m(i + 1, i) = 1.0;
  }
  if (type == BlockType::cycle) m(0, 0) = 1.0;
  if (type == BlockType::g3_path) {
    m(0, 0) = 1.0;
    m(length - 1, length - 1) = length == 1 ? 0.0 : 1.0;
  }
  return m;
}

double characteristic_poly(PolyKind kind, int n, double arg) {
  if (kind == PolyKind::r) {
    if (n < 2) throw std::invalid_argument("characteristic_poly: r needs n >= 2");
    const double lambda = arg;
    double pm2 = 1.0, pm1 = 1.0 - lambda;  // p_0, p_1
    for (int k = 2; k <= n - 1; ++k) {
      const double pk = (2.0 - lambda) * pm1 - pm2;
      pm2 = pm1;
      pm1 = pk;
    }
    // pm1 = p_{n-1}, pm2 = p_{n-2}
    return (1.0 - lambda) * pm1 - pm2;
  }
  const double theta = arg;
  const double c = std::cos(theta / 2.0);
  if (std::abs(c) < 1e-12) throw std::invalid_argument("characteristic_poly: pole at cos(theta/2) = 0");
  if (kind == PolyKind::p) return std::cos((n + 0.5) * theta) / c;
  return (2.0 * std::cos(theta) - 1.0) * std::cos((n - 0.5) * theta) / c - std::cos((n - 1.5) * theta) / c;
}

std::vector<double> block_spectra(BlockType type, int length) {
  if (length < 1) throw std::invalid_argument("block_spectra: length must be >= 1");
  std::vector<double> out;
  const double pi = std::numbers::pi;
  if (type == BlockType::cycle) {
    for (int k = 1; k <= length; ++k) out.push_back(2.0 - 2.0 * std::cos((2.0 * k - 1.0) * pi / (2.0 * length + 1.0)));
  } else if (type == BlockType::g1_path) {
    for (int k = 1; k <= length; ++k) {
      const double s = std::sin(k * pi / (2.0 * (length + 1)));
      out.push_back(4.0 * s * s);
    }
  } else {
    out.push_back(0.0);
    if (length >= 2) {
      auto f = [&](double th) { return characteristic_poly(PolyKind::f, length, th); };
      const int steps = 16 * length;
      const double hi_limit = pi * (1.0 - 0.25 / length);
      const double h = hi_limit / steps;
      double a = 0.37 * h, fa = f(a);
      for (int j = 1; j <= steps; ++j) {
        const double b = std::min((j + 0.37) * h, hi_limit);
        const double fb = f(b);
        if (fa == 0.0) {
          out.push_back(2.0 - 2.0 * std::cos(a));
        } else if (fa * fb < 0.0) {
          std::uintmax_t iters = 200;
          auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                     iters);
          const double th = 0.5 * (r.first + r.second);
          out.push_back(2.0 - 2.0 * std::cos(th));
        }
        a = b;
        fa = fb;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GapCheck no_case_gap_check(const ModifiedGraph& mg, double c_fit) {
  const AtaSpectrum sp = ata_spectrum(mg);
  if (sp.e1 > 1e-12)
    throw std::invalid_argument("no_case_gap_check: no zero eigenvalue (E1 = " + std::to_string(sp.e1) +
                                "); input is not a NO instance");
  GapCheck c;
  c.gap = sp.gap;
  c.e1 = sp.e1;
  c.l_max = sp.longest_block;
  c.bound = c_fit * std::pow(static_cast<double>(c.l_max), -4.0);
  c.ok = c.gap >= c.bound;
  return c;
}

ConfigGraph synthetic_no_graph(int l1, int l3) {
  if (l1 < 0 || l3 < 2) throw std::invalid_argument("synthetic_no_graph: need l1 >= 0 and l3 >= 2");
  ConfigGraph g;
  const int n = l1 + 1 + l3;
  for (int i = 0; i < n; ++i) g.vertices.push_back(static_cast<std::uint64_t>(i));
  for (int i = 0; i < l1; ++i) g.edges.emplace_back(i, i + 1);
  g.accept = l1;
  g.start = l1 + 1;
  for (int i = l1 + 1; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  g.reject = n - 1;
  g.outcome = Outcome::reject;
  return g;
}

ConfigGraph synthetic_yes_graph(int path_vertices) {
  if (path_vertices < 2) throw std::invalid_argument("synthetic_yes_graph: need at least 2 vertices");
  ConfigGraph g;
  for (int i = 0; i < path_vertices; ++i) g.vertices.push_back(static_cast<std::uint64_t>(i));
  for (int i = 0; i + 1 < path_vertices; ++i) g.edges.emplace_back(i, i + 1);
  g.start = 0;
  g.accept = path_vertices - 1;
  g.outcome = Outcome::accept;
  g.accept_path_edges = path_vertices - 1;
  return g;
}

AtaOracle::AtaOracle(const ReversibleTM& tm, const std::string& input, int tail_length)
    : space_(tm), tail_(tail_length) {
  if (tail_length < 1) throw std::invalid_argument("AtaOracle: tail_length must be >= 1");
  const Endpoints ep = endpoints(space_, input);
  s_ = ep.s;
  t_ = ep.t;
}

bool AtaOracle::has_self_loop(std::uint64_t v) const { return v < space_.count() && v != s_ && v != t_; }

std::vector<std::uint64_t> AtaOracle::out_neighbours(std::uint64_t v) const {
  const std::uint64_t n = space_.count();
  std::vector<std::uint64_t> o;
  if (v < n) {
    if (auto s = space_.step(v)) o.push_back(*s);
    if (has_self_loop(v)) o.push_back(v);
    if (v == t_) o.push_back(n);
  } else {
    const std::uint64_t i = v - n + 1;
    o.push_back(i < static_cast<std::uint64_t>(tail_) ? v + 1 : s_);
  }
  return o;
}

std::vector<std::uint64_t> AtaOracle::in_neighbours(std::uint64_t v) const {
  const std::uint64_t n = space_.count();
  std::vector<std::uint64_t> in;
  if (v < n) {
    in = space_.predecessors(v);
    if (has_self_loop(v)) in.push_back(v);
    if (v == s_) in.push_back(n + tail_ - 1);
  } else {
    in.push_back(v == n ? t_ : v - 1);
  }
  return in;
}

std::vector<std::pair<std::uint64_t, int>> AtaOracle::row(std::uint64_t v) const {
  if (v >= vertex_count()) throw std::invalid_argument("AtaOracle::row: vertex out of range");
  std::map<std::uint64_t, int> acc;
  for (std::uint64_t i : out_neighbours(v))
    for (std::uint64_t k : in_neighbours(i)) acc[k] += 1;
  return {acc.begin(), acc.end()};
}

void write_edges(std::ostream& os, const ModifiedGraph& mg) {
  os << "# vertices=" << mg.size() << " start=" << mg.base.start << " accept=" << mg.base.accept << '\n';
  for (int j = 0; j < mg.size(); ++j)
    for (int i : mg.out[j]) os << j << ' ' << i << '\n';
}

}  // namespace qgap
