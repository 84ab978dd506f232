#ifndef LATTAB_CODING_HPP
#define LATTAB_CODING_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lattab/error.hpp"
#include "lattab/lattice.hpp"

namespace lattab {

/// The height-three lattice L(U) on g-atoms g_0 .. g_{N-1}.
///
/// Atoms p, s, e0, e1, g_i. Co-atoms f0 (over the even g's), f1 (over the
/// odd g's), a_n = e1 v g_{2n}, b_n = e0 v g_{2n+1} and c_i = g_i v s for
/// i not in U; a co-atom exists only when its indices are below N. p is
/// below no co-atom and q = 1.
struct CodedLattice {
  std::size_t n = 0;
  std::set<std::size_t> u;
  FiniteLattice lattice;
  Elem p = 0, s = 0, e0 = 0, e1 = 0, f0 = 0, f1 = 0;
  std::vector<Elem> g;
  std::vector<Elem> a, b;
  std::vector<std::optional<Elem>> c;  // by g index

  Elem q() const noexcept { return lattice.top(); }
};

/// Throws InvalidArgument for N = 0 or an index of U outside [0, N), and
/// InternalError if the built lattice misses one of its invariants.
CodedLattice build_coded_lattice(std::set<std::size_t> const& u, std::size_t n);

/// Every g in G has g v p >= q, and no y < g does.
bool check_sw_set(FiniteLattice const& lattice, std::span<const Elem> g, Elem p, Elem q);

/// g_{2i+1} = (g_{2i} v e1) ^ f1 and g_{2i+2} = (g_{2i+1} v e0) ^ f0 wherever
/// both sides are in range.
bool check_shore_sequence(FiniteLattice const& lattice, std::span<const Elem> seq, Elem e0, Elem e1, Elem f0,
                          Elem f1);

/// Relabelled copy of a lattice whose order is given only as a stream of
/// <=-facts in a seeded order.
struct Presentation {
  std::size_t n = 0;
  std::vector<std::vector<Elem>> joins;
  std::vector<std::pair<Elem, Elem>> leq_facts;
  std::map<std::string, Elem> landmarks;  // p, q, s, e0, e1, f0, f1, g0
  std::uint64_t seed = 0;
  std::size_t g_count = 0;
  /// permutation[original id] = presented id. Ground truth for tests only;
  /// never reachable through PresentationOracle.
  std::vector<Elem> permutation;
  /// Element names by original id, for unscramble.
  std::vector<std::string> names;
  /// Encoded set, when known.
  std::optional<std::set<std::size_t>> u;
};

/// Seeded relabelling plus a seeded shuffle of every <=-fact (reflexive
/// ones included). Landmarks are carried over.
Presentation scramble(CodedLattice const& coded, std::uint64_t seed);
/// Same for a bare lattice; no landmarks.
Presentation scramble(FiniteLattice const& lattice, std::uint64_t seed);

/// Undo the relabelling. Throws InvalidArgument if the permutation is
/// missing or the facts do not form a lattice.
FiniteLattice unscramble(Presentation const& pres);

class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Access a decoder is allowed: join lookups and the fact stream in order.
class PresentationOracle {
 public:
  explicit PresentationOracle(Presentation const& pres) : pres_(&pres) {}

  std::size_t size() const noexcept { return pres_->n; }
  std::size_t g_count() const noexcept { return pres_->g_count; }
  /// Throws DecodeError for a missing landmark.
  Elem landmark(std::string const& name) const;
  /// Throws DecodeError for ids out of range.
  Elem join(Elem a, Elem b) const;
  std::size_t fact_count() const noexcept { return pres_->leq_facts.size(); }
  std::pair<Elem, Elem> fact(std::size_t i) const { return pres_->leq_facts.at(i); }

 private:
  Presentation const* pres_;
};

/// g_0 .. g_{count-1} in presented ids. g_{2i+1} is the first y in the
/// fact stream with y <= g_{2i} v e1, y <= f1 and y v p >= q; even steps
/// swap e1, f1 for e0, f0. Throws InvalidArgument for count 0 or count >
/// g_count, and DecodeError if the join table contradicts the facts or a
/// search comes up empty.
std::vector<Elem> decode_g_sequence(PresentationOracle const& oracle, std::size_t count);

/// {n < g_count : g_n v s >= q}.
std::set<std::size_t> decode_u(PresentationOracle const& oracle);

/// {"n", "joins", "leqFacts", "landmarks", "seed", "gCount"}, with the
/// ground truth under "hidden": {"permutation", "names", "U"} when known.
nlohmann::json presentation_to_json(Presentation const& pres);
/// Throws InvalidArgument on shape errors (sizes, ids out of range).
Presentation presentation_from_json(nlohmann::json const& j);

std::string format_set(std::set<std::size_t> const& u);
/// "0,1,3" or "" -> set. Throws InvalidArgument on junk.
std::set<std::size_t> parse_set(std::string const& text);

}  // namespace lattab

#endif  // LATTAB_CODING_HPP
