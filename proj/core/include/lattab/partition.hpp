#ifndef LATTAB_PARTITION_HPP
#define LATTAB_PARTITION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lattab {

/// Carrier index. Carriers are the ranges [0, n).
using Node = std::uint32_t;

/// Union-find with path compression and union by rank.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t size() const noexcept { return parent_.size(); }
  Node find(Node x);
  /// Returns true when x and y were in different classes.
  bool unite(Node x, Node y);

 private:
  std::vector<Node> parent_;
  std::vector<std::uint32_t> rank_;
};

/// An equivalence relation on [0, n), i.e. an element of Part(n).
///
/// Blocks are labelled by their minimum element, so two EqRel values are
/// equal iff they describe the same relation.
class EqRel {
 public:
  EqRel() = default;

  static EqRel discrete(std::size_t n);
  static EqRel full(std::size_t n);
  /// Blocks must be disjoint; unmentioned nodes become singletons.
  static EqRel from_blocks(std::size_t n, std::span<const std::vector<Node>> blocks);
  /// Equivalence generated by the given pairs.
  static EqRel from_pairs(std::size_t n, std::span<const std::pair<Node, Node>> pairs);
  /// Equivalence with the same classes as labels[x] (any integral labels).
  static EqRel from_labels(std::span<const std::uint32_t> labels);
  static EqRel from_union_find(UnionFind& uf);

  std::size_t size() const noexcept { return rep_.size(); }
  /// Least element of the block containing x.
  Node rep(Node x) const { return rep_.at(x); }
  bool related(Node x, Node y) const { return rep_.at(x) == rep_.at(y); }
  std::size_t block_count() const noexcept { return blocks_; }
  bool is_discrete() const noexcept { return blocks_ == size(); }
  bool is_full() const noexcept { return blocks_ <= 1; }

  /// Sorted list of sorted blocks.
  std::vector<std::vector<Node>> blocks() const;
  std::span<const Node> reps() const noexcept { return rep_; }

  /// Inclusion as sets of pairs.
  bool subset_of(EqRel const& other) const;

  /// Restriction to the listed nodes, re-indexed by their position in `nodes`.
  EqRel restrict(std::span<const Node> nodes) const;

  friend bool operator==(EqRel const&, EqRel const&) = default;

 private:
  explicit EqRel(std::vector<Node> rep);

  std::vector<Node> rep_;
  std::size_t blocks_ = 0;
};

/// Part(X) join (transitive closure of the union) and meet (intersection).
/// Both throw InvalidArgument on carrier mismatch.
EqRel part_join(EqRel const& p, EqRel const& q);
EqRel part_meet(EqRel const& p, EqRel const& q);

enum class Order { equal, finer, coarser, incomparable };

char const* to_string(Order o);

/// Inclusion comparison: finer means p is a proper subset of q.
Order compare(EqRel const& p, EqRel const& q);

/// Sorted list of sorted blocks.
nlohmann::json eqrel_to_json(EqRel const& p);
EqRel eqrel_from_json(std::size_t n, nlohmann::json const& j);

}  // namespace lattab

#endif  // LATTAB_PARTITION_HPP
