#ifndef LATTAB_PUDLAK_HPP
#define LATTAB_PUDLAK_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lattab/lattice.hpp"
#include "lattab/partition.hpp"
#include "lattab/table.hpp"

namespace lattab {

inline constexpr std::uint32_t no_parent = static_cast<std::uint32_t>(-1);

/// One pentagon of an α-cell: the chain x, u1, u2, u3, y colored
/// first, second, first, second.
struct PentagonPair {
  Elem first = 0;
  Elem second = 0;
  friend bool operator==(PentagonPair const&, PentagonPair const&) = default;
};

/// Whether the α-cell carries a pentagon for (a1, a2). Pairs touching the
/// top are excluded since no edge may be colored 1.
bool pentagon_admissible(FiniteLattice const& lattice, Elem alpha, Elem a1, Elem a2);

/// Pentagons of the α-cell in lexicographic order of (a1, a2).
/// Throws InvalidArgument for α = 1.
std::vector<PentagonPair> alpha_cell(FiniteLattice const& lattice, Elem alpha);

/// Where a node came from. Base nodes have edge == no_parent.
struct NodeOrigin {
  std::uint32_t edge = no_parent;  // base edge of the cell
  std::uint32_t round = 0;         // round in which the cell was attached
  std::uint32_t copy = 0;          // 1-based copy index of the cell
  std::uint32_t pentagon = 0;      // index into alpha_cell(color of edge)
  std::uint32_t position = 0;      // 1, 2, 3 for u1, u2, u3

  friend bool operator==(NodeOrigin const&, NodeOrigin const&) = default;
};

struct ColoredEdge {
  Node a = 0;
  Node b = 0;
  Elem color = 0;
  std::uint32_t round = 0;  // round of creation; 0 for the base edge
  std::uint32_t parent = no_parent;
  std::uint32_t copy = 0;
  std::uint32_t pentagon = 0;
  std::uint32_t link = 0;  // 0..3 along x, u1, u2, u3, y

  friend bool operator==(ColoredEdge const&, ColoredEdge const&) = default;
};

/// Graph size after one extension step.
struct StageMark {
  std::uint32_t rounds = 0;
  std::uint32_t copies = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  friend bool operator==(StageMark const&, StageMark const&) = default;
};

struct CellRef {
  Node first_node = 0;
  std::uint32_t first_edge = 0;
};

/// An L−{1}-colored graph grown from a single 0-colored edge by attaching
/// cells.
///
/// The cell (e, r, k) is copy k of the α-cell on edge e attached in round r,
/// where α is the color of e; edges created in round ρ receive cells in
/// every round r > ρ. extend(R, C) adds every missing cell with r <= R and
/// k <= C, visiting rounds in order, edges by id, then copies. Each call
/// records a StageMark, and nodes and edges of earlier marks form prefixes,
/// so every mark is a subgraph of the next.
class ColoredGraph {
 public:
  explicit ColoredGraph(FiniteLattice lattice);

  FiniteLattice const& lattice() const noexcept { return lattice_; }
  std::size_t node_count() const noexcept { return origins_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  NodeOrigin const& origin(Node x) const { return origins_.at(x); }
  std::vector<NodeOrigin> const& origins() const noexcept { return origins_; }
  std::vector<ColoredEdge> const& edges() const noexcept { return edges_; }
  /// Mark 0 is the single base edge.
  std::vector<StageMark> const& stages() const noexcept { return stages_; }
  StageMark const& stage(std::size_t i) const { return stages_.at(i); }

  /// Nodes and edges extend(rounds, copies) would add.
  std::pair<std::size_t, std::size_t> projected_growth(std::uint32_t rounds, std::uint32_t copies) const;

  /// Throws BudgetExceeded, leaving the graph untouched, if the node count
  /// would exceed node_budget.
  void extend(std::uint32_t rounds, std::uint32_t copies, std::size_t node_budget);

  std::optional<CellRef> cell(std::uint32_t edge, std::uint32_t round, std::uint32_t copy) const;
  std::vector<PentagonPair> const& pentagons(Elem alpha) const { return pairs_.at(alpha); }

  friend bool operator==(ColoredGraph const& a, ColoredGraph const& b) {
    return a.lattice_ == b.lattice_ && a.origins_ == b.origins_ && a.edges_ == b.edges_ &&
           a.stages_ == b.stages_;
  }

 private:
  void attach(std::uint32_t edge, std::uint32_t round, std::uint32_t copy);

  FiniteLattice lattice_;
  std::vector<std::vector<PentagonPair>> pairs_;  // by color
  std::vector<NodeOrigin> origins_;
  std::vector<ColoredEdge> edges_;
  std::vector<StageMark> stages_;
  /// attached_[e][r - round(e) - 1] = copies attached in round r.
  std::vector<std::vector<std::uint32_t>> attached_;
  std::unordered_map<std::uint64_t, CellRef> cells_;
};

inline constexpr std::size_t default_node_budget = 1000000;

/// Stages 𝓐_0^P .. 𝓐_n^P: mark j has j rounds of one cell per edge.
ColoredGraph build_pudlak(FiniteLattice const& lattice, std::size_t n,
                          std::size_t node_budget = default_node_budget);

/// Stages 𝓐_0 .. 𝓐_n: mark j has j rounds of j cells per edge.
ColoredGraph build_homogenized(FiniteLattice const& lattice, std::size_t n,
                               std::size_t node_budget = default_node_budget);

/// Arbitrary extension sequence; marks follow `steps` after mark 0.
ColoredGraph build_staged(FiniteLattice const& lattice,
                          std::vector<std::pair<std::uint32_t, std::uint32_t>> const& steps,
                          std::size_t node_budget = default_node_budget);

/// The map e: connectivity through edges colored >= α, inside mark `stage`.
EqRel color_connectivity(ColoredGraph const& graph, Elem alpha, std::size_t stage);

/// Lattice table of mark `stage`: nodes are graph ids, rel(α) = e(α).
LatticeTable table_of(ColoredGraph const& graph, std::size_t stage);

struct GrowthRow {
  std::size_t stage = 0;
  std::uint32_t rounds = 0;
  std::uint32_t copies = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::vector<std::size_t> histogram;  // edges per color
};

std::vector<GrowthRow> growth_stats(ColoredGraph const& graph);

struct StageCheck {
  std::size_t stage = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool injective = false;   // (a)
  bool order = false;       // (b)
  bool join_to_meet = false;  // (c) e(α∨β) = e(α) ∩ e(β)
  /// (d) e(α∧β) equals the join of e(α), e(β) taken in the next stage and
  /// restricted back; nullopt when the next stage is over budget.
  std::optional<bool> meet_to_join;
  /// (d) with the join taken inside this stage only (diagnostic).
  bool meet_to_join_local = false;
  std::string detail;

  bool passed() const noexcept { return injective && order && join_to_meet && meet_to_join.value_or(false); }
};

struct EndoDiagnostic {
  bool checked = false;
  bool exact = false;  // endomorphism enumeration complete
  std::size_t sampled = 0;
  std::size_t outside = 0;  // sampled principal congruences not in the table
};

struct RepresentationReport {
  /// Least passing stage, if any.
  std::optional<std::size_t> stage;
  std::vector<StageCheck> stages;
  bool budget_exhausted = false;
  /// Best effort, never part of the verdict: principal congruences of the
  /// enumerated End Θ at the passing stage lie in Θ̂.
  EndoDiagnostic diagnostic;
};

struct RepresentationOptions {
  std::size_t max_stage = 3;
  std::size_t node_budget = 100000;
  bool homogenized = true;
  std::size_t endo_budget = 20000;
};

/// Searches for the least stage at which α ↦ e(α) is a dual lattice
/// isomorphism onto the table's relations.
RepresentationReport verify_representation(FiniteLattice const& lattice,
                                           RepresentationOptions const& opts = {});

/// {"lattice", "stages": [{rounds, copies, nodes, edges}], "nodes": [...],
/// "edges": [...]} with colors as element names.
nlohmann::json graph_to_json(ColoredGraph const& graph);
/// Rebuilds from the lattice and stage sequence and checks the stored
/// nodes and edges against the rebuild.
ColoredGraph graph_from_json(nlohmann::json const& j, std::size_t node_budget = default_node_budget);

/// Undirected DOT with edges labelled by color name.
std::string graph_to_dot(ColoredGraph const& graph, std::size_t stage);

}  // namespace lattab

#endif  // LATTAB_PUDLAK_HPP
