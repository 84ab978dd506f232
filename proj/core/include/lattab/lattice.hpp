#ifndef LATTAB_LATTICE_HPP
#define LATTAB_LATTICE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lattab {

/// Dense element id inside a FiniteLattice.
using Elem = std::uint32_t;

class FiniteLattice;

struct Violation {
  std::string axiom;
  Elem a = 0;
  Elem b = 0;
  std::string detail;
};

struct ValidationReport;

struct ValidateOptions {
  std::size_t size_bound = 64;
  /// Close the supplied relation reflexively and transitively before checking.
  bool close = true;
};

/// Bounded finite lattice with materialized order, join and meet tables.
///
/// Instances are only obtainable through validate_lattice (or the catalog,
/// which goes through it), so every FiniteLattice satisfies the lattice
/// axioms. Values are immutable.
class FiniteLattice {
 public:
  /// The one-element lattice.
  FiniteLattice() : names_{"0"}, leq_{1}, join_{0}, meet_{0} {}

  std::size_t size() const noexcept { return names_.size(); }
  Elem bottom() const noexcept { return bottom_; }
  Elem top() const noexcept { return top_; }
  bool nontrivial() const noexcept { return bottom_ != top_; }

  bool contains(Elem a) const noexcept { return a < size(); }
  bool leq(Elem a, Elem b) const { return leq_[index(a, b)] != 0; }
  bool lt(Elem a, Elem b) const { return a != b && leq(a, b); }
  Elem join(Elem a, Elem b) const { return join_[index(a, b)]; }
  Elem meet(Elem a, Elem b) const { return meet_[index(a, b)]; }

  std::string const& name(Elem a) const { return names_.at(a); }
  std::vector<std::string> const& names() const noexcept { return names_; }
  std::optional<Elem> find(std::string const& name) const;
  /// Like find but throws InvalidArgument.
  Elem at(std::string const& name) const;

  /// The same carrier with the order reversed.
  FiniteLattice dual() const;

  friend bool operator==(FiniteLattice const&, FiniteLattice const&) = default;

 private:
  friend ValidationReport validate_lattice(std::vector<std::string>,
                                           std::span<const std::pair<Elem, Elem>>,
                                           ValidateOptions);
  std::size_t index(Elem a, Elem b) const;

  std::vector<std::string> names_;
  std::vector<char> leq_;
  std::vector<Elem> join_;
  std::vector<Elem> meet_;
  Elem bottom_ = 0;
  Elem top_ = 0;
};

struct ValidationReport {
  bool ok = false;
  std::vector<Violation> violations;
  /// Present iff ok; join/meet tables materialized.
  std::optional<FiniteLattice> lattice;
};

/// Check the lattice axioms exhaustively on a finite candidate order.
///
/// Every failed axiom is reported with a witness pair; on success the
/// returned report carries the lattice with its tables. Throws
/// InvalidArgument when the candidate exceeds opts.size_bound or a pair
/// references an unknown element.
ValidationReport validate_lattice(std::vector<std::string> names,
                                  std::span<const std::pair<Elem, Elem>> leq_pairs,
                                  ValidateOptions opts = {});

/// validate_lattice, throwing InvalidArgument with the first violation.
FiniteLattice make_lattice(std::vector<std::string> names,
                           std::span<const std::pair<Elem, Elem>> leq_pairs,
                           ValidateOptions opts = {});

/// (join, meet) of two elements. Throws InvalidArgument on unknown ids.
std::pair<Elem, Elem> bounds(FiniteLattice const& lattice, Elem a, Elem b);

// Catalog ---------------------------------------------------------------

/// Names accepted by catalog_lattice: 2, 3-chain, 4-chain, M3, N5, B2.
std::vector<std::string> const& catalog_names();
FiniteLattice catalog_lattice(std::string const& name);
FiniteLattice chain_lattice(std::size_t length);

// Homomorphisms ---------------------------------------------------------

struct HomReport {
  bool ok = true;
  /// Which equation failed: "total", "zero", "one" or "join".
  std::string failed;
  Elem a = 0;
  Elem b = 0;
  std::string detail;
};

/// Checks that map is a (0,1,join)-homomorphism source -> target.
HomReport check_usl_hom(std::span<const Elem> map, FiniteLattice const& source,
                        FiniteLattice const& target);

/// A validated (0,1,join)-homomorphism between finite lattices.
class UslHom {
 public:
  /// Throws InvalidArgument when the map fails check_usl_hom.
  UslHom(FiniteLattice source, FiniteLattice target, std::vector<Elem> map);

  static UslHom identity(FiniteLattice const& lattice);

  FiniteLattice const& source() const noexcept { return source_; }
  FiniteLattice const& target() const noexcept { return target_; }
  std::vector<Elem> const& map() const noexcept { return map_; }
  Elem operator()(Elem a) const { return map_.at(a); }

  /// Composition (next after this): source -> next.target().
  UslHom then(UslHom const& next) const;

 private:
  FiniteLattice source_;
  FiniteLattice target_;
  std::vector<Elem> map_;
};

/// All (0,1,join)-homomorphisms source -> target, in lexicographic order of
/// their value vectors.
std::vector<UslHom> enumerate_usl_homs(FiniteLattice const& source,
                                       FiniteLattice const& target);

/// The first injective homomorphism in enumeration order, if any.
std::optional<UslHom> canonical_hom(FiniteLattice const& source, FiniteLattice const& target);

/// Galois adjoint phi*(b) = join{a : phi(a) <= b}, a map target -> source.
///
/// The adjoint is checked against the four adjoint properties before it is
/// returned; a failure throws InternalError.
std::vector<Elem> galois_adjoint(UslHom const& phi);

struct AdjointClauseReport {
  bool meet_preserving = true;   // phi*(b1 ^ b2) = phi*b1 ^ phi*b2, phi*(1) = 1
  bool proper = true;            // b < 1 => phi*b < 1
  bool injective_on_image = true;
  bool order_clause = true;      // a <= phi*b <=> phi*phi(a) <= phi*b
  bool adjunction = true;        // a <= phi*b <=> phi(a) <= b
  std::string witness;

  bool ok() const noexcept {
    return meet_preserving && proper && injective_on_image && order_clause && adjunction;
  }
};

/// Evaluates every adjoint property exhaustively for a candidate adjoint.
AdjointClauseReport check_adjoint_clauses(UslHom const& phi, std::span<const Elem> adjoint);

// Direct limits ---------------------------------------------------------

struct DirectLimitSystem {
  std::vector<FiniteLattice> lattices;  // L^0 .. L^k
  std::vector<UslHom> homs;             // phi_i : L^i -> L^{i+1}
  std::size_t cutoff = 0;               // k
};

struct DirectLimit {
  /// The usl L^k standing for the quotient of the tagged disjoint union.
  FiniteLattice lattice;
  /// canonical[i][a] = class of (i, a), named by its L^k element.
  std::vector<std::vector<Elem>> canonical;

  bool identified(std::size_t i, Elem a, std::size_t j, Elem b) const {
    return canonical.at(i).at(a) == canonical.at(j).at(b);
  }
};

/// Quotient of L^0 + ... + L^k by the equivalence generated by a ~ phi_i(a).
/// Throws InvalidArgument when the system is malformed.
DirectLimit direct_limit(DirectLimitSystem const& system);

// JSON ------------------------------------------------------------------

/// {"elements": [...], "leq": [[a, b], ...]}; pairs may use names or indices.
/// Throws InvalidArgument (with the first violation) for non-lattices.
FiniteLattice lattice_from_json(nlohmann::json const& j, ValidateOptions opts = {});
/// Canonical form: elements, covering leq pairs, and join/meet tables.
nlohmann::json lattice_to_json(FiniteLattice const& lattice);

}  // namespace lattab

#endif  // LATTAB_LATTICE_HPP
