#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgap/linalg.hpp"

namespace qgap {

enum class Move { left, right, stay };

struct Rule {
  int next_state = 0;
  int write = 0;
  Move move = Move::stay;
};

// Symbol 0 is the blank. Accept and reject states halt.
struct ReversibleTM {
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  int start = 0;
  int accept = 0;
  int reject = 0;
  int space = 1;
  std::map<std::pair<int, int>, Rule> delta;
  std::optional<int> accept_head;
  std::optional<std::vector<int>> accept_tape;

  int state_index(const std::string& name) const;
  int symbol_index(const std::string& name) const;
  std::vector<int> encode_input(const std::string& input) const;
};

ReversibleTM parse_tm(std::istream& is);
ReversibleTM load_tm(const std::string& path);

struct Configuration {
  int state = 0;
  int head = 0;
  std::vector<int> tape;
  bool operator==(const Configuration&) const = default;
};

inline constexpr std::uint64_t kConfigCap = std::uint64_t{1} << 20;

class ConfigSpace {
 public:
  explicit ConfigSpace(const ReversibleTM& tm);
  std::uint64_t count() const { return count_; }
  std::uint64_t encode(const Configuration& c) const;
  Configuration decode(std::uint64_t code) const;
  std::optional<std::uint64_t> step(std::uint64_t code) const;
  std::vector<std::uint64_t> predecessors(std::uint64_t code) const;
  const ReversibleTM& tm() const { return tm_; }

 private:
  ReversibleTM tm_;
  std::uint64_t tapes_ = 1;
  std::uint64_t count_ = 0;
};

// Throws std::invalid_argument naming two configurations with a common successor.
void check_reversible(const ReversibleTM& tm, std::uint64_t cap = kConfigCap);

enum class Enumeration { reachable, full };
enum class Outcome { accept, reject, undecided };

struct ConfigGraph {
  std::vector<std::uint64_t> vertices;  // configuration codes, or plain labels for synthetic graphs
  std::vector<std::pair<int, int>> edges;
  int start = -1;
  int accept = -1;  // t_x
  int reject = -1;
  Outcome outcome = Outcome::undecided;
  int accept_path_edges = -1;  // edges s_x -> t_x when accepting

  int size() const { return static_cast<int>(vertices.size()); }
  void check_degrees() const;
};

ConfigGraph build_config_graph(const ReversibleTM& tm, const std::string& input,
                               Enumeration mode = Enumeration::reachable, std::uint64_t cap = kConfigCap);

// Vertices [0, base.size()) from the base graph, then tail vertices 1..t(n).
struct ModifiedGraph {
  ConfigGraph base;
  int tail_length = 0;
  std::vector<bool> self_loop;
  std::vector<std::vector<int>> out;  // out[j] = sorted targets i of edges j -> i, self-loops included

  int size() const { return static_cast<int>(out.size()); }
  int tail_vertex(int i) const { return base.size() + i - 1; }  // i in 1..tail_length
  SparseHermitian adjacency_gram() const;  // A'^dagger A'
};

ModifiedGraph modify_graph(const ConfigGraph& g, int tail_length);

struct AtaSpectrum {
  std::vector<double> eigenvalues;
  double e1 = 0.0;
  double gap = 0.0;
  std::vector<int> block_sizes;
  int longest_block = 0;
  int cycle_length = 0;  // length of the directed cycle through s_x, 0 if none
};

AtaSpectrum ata_spectrum(const ModifiedGraph& mg, std::size_t block_cap = 4096);

enum class BlockType { cycle, g1_path, g3_path };
CMatrix block_matrix(BlockType type, int length);
std::vector<double> block_spectra(BlockType type, int length);

enum class PolyKind { p, r, f };
double characteristic_poly(PolyKind kind, int n, double arg);

inline constexpr double kGapFitConstant = 0.1;

struct GapCheck {
  double gap = 0.0;
  double bound = 0.0;
  double e1 = 0.0;
  int l_max = 0;
  bool ok = false;
};

GapCheck no_case_gap_check(const ModifiedGraph& mg, double c_fit = kGapFitConstant);

// Abstract graphs with the shapes a reversible machine produces.
// NO: chain of l1 vertices into t_x, isolated from the s_x path of l3 vertices ending at reject.
ConfigGraph synthetic_no_graph(int l1, int l3);
// YES: s_x path of `path_vertices` vertices ending at t_x.
ConfigGraph synthetic_yes_graph(int path_vertices);

// Rows of A'^dagger A' computed from the machine without building the graph.
// Vertex ids: configuration codes, then count() + i - 1 for tail vertex i.
class AtaOracle {
 public:
  AtaOracle(const ReversibleTM& tm, const std::string& input, int tail_length);
  std::uint64_t vertex_count() const { return space_.count() + static_cast<std::uint64_t>(tail_); }
  std::vector<std::pair<std::uint64_t, int>> row(std::uint64_t v) const;
  std::uint64_t start() const { return s_; }
  std::uint64_t accept() const { return t_; }

 private:
  std::vector<std::uint64_t> out_neighbours(std::uint64_t v) const;
  std::vector<std::uint64_t> in_neighbours(std::uint64_t v) const;
  bool has_self_loop(std::uint64_t v) const;

  ConfigSpace space_;
  int tail_;
  std::uint64_t s_ = 0, t_ = 0;
};

void write_edges(std::ostream& os, const ModifiedGraph& mg);

}  // namespace qgap
