#ifndef LATTAB_ALGEBRA_HPP
#define LATTAB_ALGEBRA_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lattab/partition.hpp"
#include "lattab/table.hpp"

namespace lattab {

/// A total self-map of [0, n), stored as its value vector.
using Transformation = std::vector<Node>;

Transformation identity_map(std::size_t n);
Transformation constant_map(std::size_t n, Node value);
/// (g after f)(x) = g(f(x)).
Transformation compose(Transformation const& f, Transformation const& g);

/// A set of self-maps of [0, n) closed under composition.
struct UnaryAlgebra {
  std::size_t carrier = 0;
  std::vector<Transformation> maps;  // sorted, distinct
  /// True when the identity was added by close_composition rather than
  /// generated.
  bool identity_adjoined = false;
};

struct ClosureOptions {
  std::size_t budget = 100000;
  bool adjoin_identity = false;
};

/// Least composition-closed set containing the generators.
/// Throws BudgetExceeded when it would exceed opts.budget maps.
UnaryAlgebra close_composition(std::size_t carrier, std::span<const Transformation> generators,
                               ClosureOptions opts = {});

struct CongruenceLattice {
  std::vector<EqRel> congruences;  // index = lattice element id
  FiniteLattice lattice;           // ordered by inclusion
};

/// All partitions preserved by every map, by exhaustive enumeration of
/// Part(n). Throws InvalidArgument when carrier > max_carrier.
CongruenceLattice congruence_lattice(UnaryAlgebra const& algebra, std::size_t max_carrier = 7);

/// Lattice table whose relations are Con A, labelled by the dual of Con A.
LatticeTable dual_congruence_table(UnaryAlgebra const& algebra, std::size_t max_carrier = 7);

/// f preserves every relation of the table.
bool is_endomorphism(LatticeTable const& table, Transformation const& f);

struct EndoResult {
  std::vector<Transformation> maps;
  bool complete = false;
  std::size_t visited = 0;
};

/// Backtracking enumeration of End Θ: nodes assigned in carrier order,
/// candidate images in increasing order, with per-relation block
/// consistency propagation. Stops after `budget` visited partial
/// assignments, leaving complete = false.
EndoResult endomorphisms(LatticeTable const& table, std::size_t budget);

struct EndoSearch {
  SearchStatus status = SearchStatus::not_found;
  Transformation map;
  std::size_t visited = 0;
};

/// One endomorphism extending the fixed assignments (positions).
EndoSearch find_endomorphism(LatticeTable const& table,
                             std::span<const std::pair<Node, Node>> fixed, std::size_t budget);

/// The search behind endomorphisms() and find_endomorphism(), keeping the
/// per-table block index alive across many queries. Not thread-safe.
class EndoSearcher {
 public:
  explicit EndoSearcher(LatticeTable const& table);

  std::size_t size() const noexcept { return n_; }
  EndoSearch find(std::span<const std::pair<Node, Node>> fixed, std::size_t budget);
  EndoResult enumerate(std::size_t budget);

 private:
  static constexpr Node none = static_cast<Node>(-1);

  bool assign(Node x, Node v);
  void undo_to(std::size_t mark);
  /// Depth-first completion of the current partial map over the nodes not
  /// yet assigned. `emit` returns false to stop.
  template <class Emit>
  SearchStatus complete(std::size_t budget, std::size_t& visited, Emit&& emit);

  std::size_t n_ = 0;
  std::vector<std::vector<Node>> rep_;                   // per relation
  std::vector<std::vector<std::vector<Node>>> members_;  // per relation, by rep
  std::vector<std::vector<Node>> target_;                // per relation, by rep
  std::vector<Node> image_;
  std::vector<std::pair<std::size_t, Node>> undo_;
};

struct PrincipalCongruence {
  EqRel relation;
  /// False when computed from an incomplete endomorphism set.
  bool exact = false;
};

/// Equivalence generated by (f(x), f(y)) over the given endomorphisms.
PrincipalCongruence principal_congruence(LatticeTable const& table, std::size_t x, std::size_t y,
                                         EndoResult const& endos);

/// Pairs (x, y) whose generated relation over `maps` escapes C(x, y).
/// Empty whenever every map is an endomorphism.
std::vector<std::pair<std::size_t, std::size_t>> principal_inclusion_violations(
    LatticeTable const& table, std::span<const Transformation> maps);

struct HomogeneityCertificate {
  std::size_t x = 0, y = 0, u = 0, v = 0;
  /// z_0 = u, ..., z_{n+1} = v.
  std::vector<std::size_t> chain;
  /// f_0 .. f_n with {f_i(x), f_i(y)} = {z_i, z_{i+1}}.
  std::vector<Transformation> maps;
};

struct InterpolantSearch {
  SearchStatus status = SearchStatus::not_found;
  HomogeneityCertificate certificate;
  std::size_t visited = 0;
};

/// Breadth-first search from u over nodes reachable through endomorphic
/// images of {x, y}; each step is a constrained endomorphism search capped
/// at `budget`. Throws InvalidArgument when the quadruple's premise fails.
InterpolantSearch find_homogeneity_interpolants(LatticeTable const& table, std::size_t x,
                                                std::size_t y, std::size_t u, std::size_t v,
                                                std::size_t budget);

/// Same search with the steps drawn from a fixed list of maps.
InterpolantSearch find_homogeneity_interpolants(LatticeTable const& table, std::size_t x,
                                                std::size_t y, std::size_t u, std::size_t v,
                                                std::span<const Transformation> maps);

/// Independent re-verification: premise, chain shape, and each map an
/// endomorphism of the table.
bool recheck_certificate(LatticeTable const& table, HomogeneityCertificate const& cert,
                         std::string* why = nullptr);

struct MaltsevReport {
  Verdict verdict = Verdict::verified;
  /// End Θ fully enumerated within budget.
  bool complete_enumeration = false;
  std::size_t endomorphisms = 0;
  std::size_t premise_quadruples = 0;
  std::size_t certified = 0;
  /// First quadruple without interpolants (refuted) or undecided (unknown).
  std::optional<std::array<std::size_t, 4>> witness;
  /// A sample of certificates in quadruple order.
  std::vector<HomogeneityCertificate> certificates;
};

struct MaltsevOptions {
  /// Budget for the full endomorphism enumeration.
  std::size_t enumeration_budget = 200000;
  /// Budget per constrained search when enumeration is incomplete.
  std::size_t search_budget = 20000;
  std::size_t keep_certificates = 8;
};

struct HomogeneitySweep {
  Verdict verdict = Verdict::verified;
  std::size_t premise_quadruples = 0;
  std::size_t certified = 0;
  std::size_t searches = 0;
  /// Positions in the searched table.
  std::optional<std::array<std::size_t, 4>> witness;
  std::vector<HomogeneityCertificate> certificates;
};

/// Homogeneity interpolants for every quadruple whose premise holds in
/// `premise`, a sub-table of `table`; chains and maps are searched in
/// `table`. Steps come from known maps, from two-valued maps built off
/// joins of relations, and otherwise from constrained endomorphism searches
/// capped at `search_budget` visits each, for at most 2n^2 pairs per
/// (x, y) clamped to [256, 4096]. A missing interpolant is refuted only
/// when every search along the way finished. On tables above 45 nodes no
/// new searches start after the first undecided quadruple.
HomogeneitySweep homogeneity_sweep(LatticeTable const& table, LatticeTable const& premise,
                                   std::size_t search_budget, std::size_t keep_certificates = 0);

/// Checks C(x, y) ⊆ End(x, y) for every pair. With complete enumeration the
/// interpolant graph of each (x, y) is read off End Θ; otherwise each step
/// is decided by a constrained search.
MaltsevReport check_maltsev(LatticeTable const& table, MaltsevOptions const& opts = {});

nlohmann::json certificate_to_json(HomogeneityCertificate const& cert, LatticeTable const& table);
HomogeneityCertificate certificate_from_json(nlohmann::json const& j, LatticeTable const& table);

}  // namespace lattab

#endif  // LATTAB_ALGEBRA_HPP
