#ifndef LATTAB_MORPHISM_HPP
#define LATTAB_MORPHISM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lattab/lattice.hpp"
#include "lattab/pudlak.hpp"
#include "lattab/table.hpp"

namespace lattab {

/// A colored graph with no construction history, e.g. a recolored one.
struct PlainColoredGraph {
  FiniteLattice lattice;
  std::size_t nodes = 0;
  std::vector<ColoredEdge> edges;
};

/// Same nodes and edges as mark `stage` of a graph over φ's target, each
/// color β replaced by φ*β. Throws InvalidArgument if the graph's lattice
/// is not φ's target.
PlainColoredGraph recolor(ColoredGraph const& graph, UslHom const& phi, std::size_t stage);

/// rel(α) = connectivity through edges colored >= α.
LatticeTable table_of(PlainColoredGraph const& graph);

/// Copy slot given to one source pentagon.
struct CopyAllocation {
  std::uint32_t source_edge = 0;
  std::uint32_t round = 0;
  std::uint32_t source_copy = 0;
  std::uint32_t source_pentagon = 0;
  std::uint32_t target_pentagon = 0;  // index in the image edge's cell
  std::uint32_t slot = 0;             // target copy, from 1
  friend bool operator==(CopyAllocation const&, CopyAllocation const&) = default;
};

/// Θ(φ) for φ: L⁰ → L¹, mapping a graph over L¹ into one over L⁰.
///
/// The base edge goes to the base edge. A source pentagon (β1, β2) on edge
/// e, round r, lands on the pentagon (φ*β1, φ*β2) of the cell on the image
/// of e in round r; its copy is the next free slot for that image edge,
/// round and target pentagon, taken in source id order. The target is the
/// build with the same rounds and just enough copies per mark.
struct TableEmbedding {
  UslHom phi;
  std::vector<Elem> adjoint;
  ColoredGraph source;
  ColoredGraph target;
  std::vector<Node> node_map;
  std::vector<std::uint32_t> edge_map;
  std::vector<CopyAllocation> allocation;  // one per source pentagon
  /// Largest slot used by the source cells of each source mark.
  std::vector<std::uint32_t> copies_needed;

  /// Least homogenized target stage containing the image of source mark
  /// `mark`, when the source marks are homogenized stages.
  std::size_t required_stage(std::size_t mark) const;
};

/// Throws InvalidArgument if the source lattice is not φ's target or
/// φ*(0) != 0, and BudgetExceeded if the target build exceeds node_budget.
/// min_copies[j] raises the copy count of target mark j.
TableEmbedding embed_graph(UslHom const& phi, ColoredGraph source,
                           std::size_t node_budget = default_node_budget,
                           std::vector<std::uint32_t> const& min_copies = {});

/// Embedding of the homogenized stage n over φ's target.
TableEmbedding embed_homogenized(UslHom const& phi, std::size_t n,
                                 std::size_t node_budget = default_node_budget);

/// m(n) without building anything: n times the largest number of source
/// pentagons sharing a target pentagon, over colors present before round n.
std::size_t required_stage_formula(UslHom const& phi, std::size_t n);

struct EmbeddingReport {
  bool injective = true;
  bool base_edge = true;
  bool colors = true;    // image edges exist with color φ*(source color)
  bool subtable = true;  // table of the recolored source sits inside the target
  bool label_transport = true;  // x ~_{φα} y iff f(x) ~_α f(y), all pairs and α
  std::size_t pairs_checked = 0;
  std::string detail;
  /// First pair breaking label_transport: source ids and the target label.
  std::optional<Node> witness_x, witness_y;
  std::optional<Elem> witness_label;
  /// First source edge whose image is missing or miscolored.
  std::optional<std::uint32_t> witness_edge;

  bool ok() const noexcept { return injective && base_edge && colors && subtable && label_transport; }
};

/// Checks the last marks of source and target.
EmbeddingReport verify_embedding(TableEmbedding const& emb);

/// {"phi": {...}, "source_stages", "target_stages", "node_map", "edge_map",
/// "allocation"}.
nlohmann::json embedding_to_json(TableEmbedding const& emb);
/// Rebuilds both graphs from their stage sequences; node and edge maps are
/// taken as stored so a tampered file is caught by verify_embedding.
TableEmbedding embedding_from_json(nlohmann::json const& j, std::size_t node_budget = default_node_budget);

/// j with marks[j] <= k < marks[j + 1] (the last j if k is past the end).
/// Throws InvalidArgument if k < marks[0] or marks is not increasing.
std::size_t padded_index(std::vector<std::size_t> const& marks, std::size_t k);

/// Finite-stage realization of a chain L⁰ → L¹ → ... → Lᵏ.
struct SystemAssembly {
  std::vector<FiniteLattice> lattices;
  std::vector<UslHom> homs;
  std::size_t stages = 0;  // J: stages 0..J of every level
  std::vector<std::size_t> h;
  /// m[i][n] for i < k and n <= J.
  std::vector<std::vector<std::size_t>> m;
  /// composite[i][j] = m_0(m_1(... m_{i-1}(j))): the level-0 stage index of
  /// Θ^i_j.
  std::vector<std::vector<std::size_t>> composite;
  /// Level graphs: level k is the homogenized stage J of Lᵏ, each lower
  /// level the truncation receiving the level above.
  std::vector<ColoredGraph> graphs;
  std::vector<TableEmbedding> embeddings;  // embeddings[i]: level i+1 into level i
  /// Composite node maps from each level into level 0.
  std::vector<std::vector<Node>> to_base;
  /// tables[i][j]: the homogenized stage j of Lⁱ carried into level-0 ids,
  /// labelled by Lⁱ.
  std::vector<std::vector<LatticeTable>> tables;

  bool nested = true;          // |Θ^i| ⊇ |Θ^{i+1}| and Θ^i_j ⊆ Θ^i_{j+1}
  bool identity_sweep = true;  // Θ^i restricted to |Θ^{i+1}| is Θ^{i+1} relabelled by φ_i
  std::size_t pairs_checked = 0;
  std::string detail;

  bool ok() const noexcept { return nested && identity_sweep; }
  /// Θ^i_k under the padding rule.
  LatticeTable const& table(std::size_t level, std::size_t k) const;
};

/// homs[i]: Lⁱ → Lⁱ⁺¹. Throws InvalidArgument on a broken chain and
/// BudgetExceeded if a level graph exceeds node_budget.
SystemAssembly assemble_system(std::vector<UslHom> const& homs, std::size_t stages,
                               std::size_t node_budget = default_node_budget);

nlohmann::json assembly_to_json(SystemAssembly const& sys);

}  // namespace lattab

#endif  // LATTAB_MORPHISM_HPP
