#ifndef LATTAB_TABLE_HPP
#define LATTAB_TABLE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lattab/lattice.hpp"
#include "lattab/partition.hpp"

namespace lattab {

enum class Verdict { verified, refuted, unknown };

char const* to_string(Verdict v);

enum class TableKind { lattice_table, usl_table, invalid };

char const* to_string(TableKind k);

struct TableKindReport {
  TableKind kind = TableKind::lattice_table;
  /// For demoted tables: which Part operation left the family ("meet" =
  /// intersection, "join" = transitive closure of the union) and on which
  /// pair of labels.
  std::string broken;
  Elem a = 0;
  Elem b = 0;
};

/// A carrier together with one equivalence relation per element of a label
/// lattice L.
///
/// Relations are stored per label, so non-injective labellings are
/// representable; the family of distinct relations is the table's relation
/// set. The table order is reverse inclusion: a <= b in L implies
/// rel(a) contains rel(b). rel(0) is the full relation and rel(1) the
/// diagonal.
///
/// Carrier nodes carry external ids (e.g. graph node ids), listed in
/// strictly increasing order; relations are indexed by position.
class LatticeTable {
 public:
  /// Throws InvalidArgument when the invariants above fail.
  LatticeTable(FiniteLattice labels, std::vector<Node> nodes, std::vector<EqRel> rel);
  /// Carrier [0, n) with ids equal to positions.
  LatticeTable(FiniteLattice labels, std::vector<EqRel> const& rel);

  FiniteLattice const& labels() const noexcept { return labels_; }
  std::vector<Node> const& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  EqRel const& rel(Elem a) const { return rel_.at(a); }
  std::vector<EqRel> const& relations() const noexcept { return rel_; }
  bool related(Elem a, std::size_t x, std::size_t y) const { return rel_.at(a).related(x, y); }

  /// Position of an external id, if present.
  std::optional<std::size_t> index_of(Node id) const;
  /// Like index_of but throws InvalidArgument.
  std::size_t position(Node id) const;

  /// Distinct relations, in label order of first occurrence.
  std::vector<EqRel> distinct_relations() const;
  bool labeling_injective() const;
  TableKindReport kind() const;

  friend bool operator==(LatticeTable const&, LatticeTable const&) = default;

 private:
  FiniteLattice labels_;
  std::vector<Node> nodes_;
  std::vector<EqRel> rel_;
};

struct RestrictResult {
  LatticeTable table;
  TableKindReport kind;
};

/// Restriction to the nodes with the given external ids.
/// Throws InvalidArgument for empty or foreign subsets.
RestrictResult restrict_table(LatticeTable const& table, std::span<const Node> ids);

struct SubtableReport {
  bool ok = true;
  std::string reason;
  /// Disagreeing pair (external ids) and label, when relations differ.
  Node x = 0;
  Node y = 0;
  Elem label = 0;
};

/// small is a sub-table of big: its carrier is contained in big's and each
/// relation of big restricted to that carrier equals small's relation with
/// the same label. Throws InvalidArgument if the label lattices differ.
SubtableReport check_subtable(LatticeTable const& small, LatticeTable const& big);

/// Intersection of every relation containing (x, y); positions, not ids.
EqRel principal_equivalence(LatticeTable const& table, std::size_t x, std::size_t y);

enum class SearchStatus { found, not_found, budget_exhausted };

char const* to_string(SearchStatus s);

struct MeetInterpolants {
  SearchStatus status = SearchStatus::not_found;
  /// z_1 .. z_n (positions): x ~a z_1 ~b z_2 ... ~a z_n ~b y.
  std::vector<std::size_t> chain;
  std::size_t visited = 0;
};

/// Shortest alternating a/b chain from x to y by breadth-first search.
/// Throws InvalidArgument unless x ~ y under rel(a ^ b).
MeetInterpolants find_meet_interpolants(LatticeTable const& table, Elem a, Elem b,
                                        std::size_t x, std::size_t y, std::size_t budget);

/// Same search without the precondition (used to look for interpolants of a
/// smaller table inside a larger one).
MeetInterpolants search_alternating_chain(LatticeTable const& table, Elem a, Elem b,
                                          std::size_t x, std::size_t y, std::size_t budget);

/// A finite prefix Θ_0 ⊆ Θ_1 ⊆ ... over a shared label lattice.
struct TableChain {
  std::vector<LatticeTable> tables;
  /// Indices of a distinguished subsequence (empty = all).
  std::vector<std::size_t> markers;
};

struct ClauseResult {
  Verdict verdict = Verdict::verified;
  std::string detail;
};

struct SequentialReport {
  ClauseResult usl_stages;        // each stage closed under intersection
  ClauseResult lattice_union;     // the union is a lattice table
  ClauseResult meet_interpolants; // for stage n, inside stage n + 1
  ClauseResult homogeneity;       // for stage n, inside stage n + 1
  ClauseResult coherent;          // stage n is a sub-table of stage n + 1

  bool all_verified() const noexcept;
};

/// Per-clause sequentiality check of a finite chain. Homogeneity
/// interpolants are searched with endomorphisms of the next stage, each
/// constrained search capped at `budget` visited partial assignments.
SequentialReport check_sequential(TableChain const& chain, std::size_t budget);

/// Greedy subsequence n_0 = 0, n_{k+1} = least m with every meet and
/// homogeneity interpolant for stage n_k found inside stage m. Throws
/// BudgetExceeded when a stage (other than the last) cannot be closed, and
/// InvalidArgument for a zero budget.
std::vector<std::size_t> sequentialize(TableChain const& chain, std::size_t budget);

// JSON ------------------------------------------------------------------

/// {"nodes": [...], "relations": {label: [blocks of ids]}, "lattice": {...}}
nlohmann::json table_to_json(LatticeTable const& table);
/// Reads table_to_json output. Without "lattice", the labels are the
/// relation names ordered by reverse inclusion.
LatticeTable table_from_json(nlohmann::json const& j);

}  // namespace lattab

#endif  // LATTAB_TABLE_HPP
