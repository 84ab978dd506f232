#include "lattab/algebra.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lattab/error.hpp"

namespace lattab {

Transformation identity_map(std::size_t n) {
  Transformation f(n);
  for (Node x = 0; x < n; ++x) f[x] = x;
  return f;
}

Transformation constant_map(std::size_t n, Node value) {
  if (value >= n) throw InvalidArgument("constant outside carrier");
  return Transformation(n, value);
}

Transformation compose(Transformation const& f, Transformation const& g) {
  if (f.size() != g.size()) throw InvalidArgument("maps on different carriers");
  Transformation h(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) h[x] = g.at(f[x]);
  return h;
}

UnaryAlgebra close_composition(std::size_t carrier, std::span<const Transformation> generators,
                               ClosureOptions opts) {
  for (auto const& g : generators) {
    if (g.size() != carrier) throw InvalidArgument("generator has the wrong carrier size");
    for (Node v : g)
      if (v >= carrier) throw InvalidArgument("generator leaves the carrier");
  }
  std::set<Transformation> seen;
  std::deque<Transformation> queue;
  auto admit = [&](Transformation f) {
    if (seen.count(f)) return;
    if (seen.size() >= opts.budget) {
      throw BudgetExceeded("composition closure exceeds the map budget",
                           opts.budget);
    }
    seen.insert(f);
    queue.push_back(std::move(f));
  };
  for (auto const& g : generators) admit(g);
  // Every product of generators arises by extending a shorter one.
  while (!queue.empty()) {
    Transformation f = std::move(queue.front());
    queue.pop_front();
    for (auto const& g : generators) admit(compose(f, g));
  }
  UnaryAlgebra out;
  out.carrier = carrier;
  if (opts.adjoin_identity) {
    Transformation id = identity_map(carrier);
    if (!seen.count(id)) {
      seen.insert(std::move(id));
      out.identity_adjoined = true;
    }
  }
  out.maps.assign(seen.begin(), seen.end());
  return out;
}

namespace {

bool preserves(Transformation const& f, EqRel const& r) {
  for (Node x = 0; x < r.size(); ++x)
    if (!r.related(f[x], f[r.rep(x)])) return false;
  return true;
}

std::string partition_name(EqRel const& p) {
  std::string out;
  bool const wide = p.size() > 10;
  for (auto const& block : p.blocks()) {
    if (!out.empty()) out += '|';
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (wide && i > 0) out += '.';
      out += std::to_string(block[i]);
    }
  }
  return out;
}

}  // namespace

CongruenceLattice congruence_lattice(UnaryAlgebra const& algebra, std::size_t max_carrier) {
  std::size_t const n = algebra.carrier;
  if (n == 0) throw InvalidArgument("empty carrier");
  if (n > max_carrier) {
    throw InvalidArgument("carrier of size " + std::to_string(n) + " exceeds the exhaustive bound " +
                          std::to_string(max_carrier));
  }
  // Restricted growth strings enumerate Part(n) once each.
  std::vector<EqRel> cons;
  std::vector<std::uint32_t> rgs(n, 0), peak(n, 0);
  while (true) {
    EqRel p = EqRel::from_labels(rgs);
    bool ok = true;
    for (auto const& f : algebra.maps)
      if (!preserves(f, p)) {
        ok = false;
        break;
      }
    if (ok) cons.push_back(std::move(p));
    // Next string: bump the last position that may still grow.
    std::size_t i = n;
    bool more = false;
    while (i-- > 1) {
      if (rgs[i] <= peak[i - 1]) {
        more = true;
        break;
      }
    }
    if (!more) break;
    ++rgs[i];
    peak[i] = std::max(peak[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      peak[j] = peak[i];
    }
  }
  std::vector<std::string> names;
  std::vector<std::pair<Elem, Elem>> pairs;
  for (auto const& c : cons) names.push_back(partition_name(c));
  for (Elem a = 0; a < cons.size(); ++a)
    for (Elem b = 0; b < cons.size(); ++b)
      if (cons[a].subset_of(cons[b])) pairs.emplace_back(a, b);
  ValidateOptions opts;
  opts.size_bound = std::max<std::size_t>(opts.size_bound, cons.size());
  FiniteLattice lattice = make_lattice(std::move(names), pairs, opts);
  return {std::move(cons), std::move(lattice)};
}

LatticeTable dual_congruence_table(UnaryAlgebra const& algebra, std::size_t max_carrier) {
  auto con = congruence_lattice(algebra, max_carrier);
  FiniteLattice labels = con.lattice.dual();
  return LatticeTable(std::move(labels), std::move(con.congruences));
}

bool is_endomorphism(LatticeTable const& table, Transformation const& f) {
  if (f.size() != table.size()) return false;
  for (Node v : f)
    if (v >= table.size()) return false;
  for (auto const& r : table.distinct_relations())
    if (!preserves(f, r)) return false;
  return true;
}

// Endomorphism search ---------------------------------------------------

EndoSearcher::EndoSearcher(LatticeTable const& table) : n_(table.size()) {
  for (auto const& r : table.distinct_relations()) {
    if (r.is_full() || r.is_discrete()) continue;
    std::vector<Node> rep(r.reps().begin(), r.reps().end());
    std::vector<std::vector<Node>> members(n_);
    for (Node x = 0; x < n_; ++x) members[rep[x]].push_back(x);
    rep_.push_back(std::move(rep));
    members_.push_back(std::move(members));
    target_.emplace_back(n_, none);
  }
  image_.assign(n_, none);
}

bool EndoSearcher::assign(Node x, Node v) {
  for (std::size_t r = 0; r < rep_.size(); ++r) {
    Node const t = target_[r][rep_[r][x]];
    if (t != none && t != rep_[r][v]) return false;
  }
  for (std::size_t r = 0; r < rep_.size(); ++r) {
    Node& t = target_[r][rep_[r][x]];
    if (t == none) {
      t = rep_[r][v];
      undo_.emplace_back(r, rep_[r][x]);
    }
  }
  image_[x] = v;
  return true;
}

void EndoSearcher::undo_to(std::size_t mark) {
  while (undo_.size() > mark) {
    auto [r, block] = undo_.back();
    target_[r][block] = none;
    undo_.pop_back();
  }
}

template <class Emit>
SearchStatus EndoSearcher::complete(std::size_t budget, std::size_t& visited, Emit&& emit) {
  std::vector<Node> order;
  for (Node x = 0; x < n_; ++x)
    if (image_[x] == none) order.push_back(x);

  struct Frame {
    std::size_t mark = 0;
    std::vector<Node> const* list = nullptr;  // null: every node is a candidate
    std::size_t next = 0;
  };
  std::vector<Frame> frames(order.size() + 1);
  auto open = [&](std::size_t d) {
    Frame& f = frames[d];
    f.mark = undo_.size();
    f.list = nullptr;
    f.next = 0;
    if (d == order.size()) return;
    Node const x = order[d];
    for (std::size_t r = 0; r < rep_.size(); ++r) {
      Node const t = target_[r][rep_[r][x]];
      if (t == none) continue;
      auto const* cand = &members_[r][t];
      if (!f.list || cand->size() < f.list->size()) f.list = cand;
    }
  };

  std::size_t depth = 0;
  open(0);
  while (true) {
    if (depth == order.size()) {
      if (!emit(image_)) return SearchStatus::found;
      if (depth == 0) return SearchStatus::not_found;
      --depth;
      image_[order[depth]] = none;
      undo_to(frames[depth].mark);
      continue;
    }
    Frame& f = frames[depth];
    Node const x = order[depth];
    std::size_t const limit = f.list ? f.list->size() : n_;
    bool advanced = false;
    while (f.next < limit) {
      Node const v = f.list ? (*f.list)[f.next] : static_cast<Node>(f.next);
      ++f.next;
      if (!assign(x, v)) continue;
      if (++visited > budget) {
        image_[x] = none;
        undo_to(f.mark);
        return SearchStatus::budget_exhausted;
      }
      advanced = true;
      break;
    }
    if (advanced) {
      ++depth;
      open(depth);
      continue;
    }
    if (depth == 0) return SearchStatus::not_found;
    --depth;
    image_[order[depth]] = none;
    undo_to(frames[depth].mark);
  }
}

EndoSearch EndoSearcher::find(std::span<const std::pair<Node, Node>> fixed, std::size_t budget) {
  EndoSearch out;
  std::fill(image_.begin(), image_.end(), none);
  undo_to(0);
  bool consistent = true;
  for (auto [x, v] : fixed) {
    if (x >= n_ || v >= n_) throw InvalidArgument("fixed assignment outside carrier");
    if (image_[x] != none) {
      if (image_[x] != v) consistent = false;
    } else if (!assign(x, v)) {
      consistent = false;
    }
    if (!consistent) break;
  }
  if (consistent) {
    out.status = complete(budget, out.visited, [&](std::vector<Node> const& f) {
      out.map = f;
      return false;
    });
  }
  std::fill(image_.begin(), image_.end(), none);
  undo_to(0);
  return out;
}

EndoResult EndoSearcher::enumerate(std::size_t budget) {
  EndoResult out;
  std::fill(image_.begin(), image_.end(), none);
  undo_to(0);
  auto status = complete(budget, out.visited, [&](std::vector<Node> const& f) {
    out.maps.push_back(f);
    return true;
  });
  out.complete = status == SearchStatus::not_found;
  std::fill(image_.begin(), image_.end(), none);
  undo_to(0);
  return out;
}

EndoResult endomorphisms(LatticeTable const& table, std::size_t budget) {
  EndoSearcher s(table);
  return s.enumerate(budget);
}

EndoSearch find_endomorphism(LatticeTable const& table,
                             std::span<const std::pair<Node, Node>> fixed, std::size_t budget) {
  EndoSearcher s(table);
  return s.find(fixed, budget);
}

PrincipalCongruence principal_congruence(LatticeTable const& table, std::size_t x, std::size_t y,
                                         EndoResult const& endos) {
  if (x >= table.size() || y >= table.size()) throw InvalidArgument("node outside table");
  UnionFind uf(table.size());
  for (auto const& f : endos.maps) uf.unite(f.at(x), f.at(y));
  uf.unite(static_cast<Node>(x), static_cast<Node>(y));
  return {EqRel::from_union_find(uf), endos.complete};
}

namespace {

/// Which distinct relations contain each pair, memoizing C(x, y) per
/// signature.
class PrincipalIndex {
 public:
  explicit PrincipalIndex(LatticeTable const& table)
      : rels_(table.distinct_relations()), size_(table.size()) {
    if (rels_.size() > 64) throw InvalidArgument("too many distinct relations");
  }

  std::uint64_t signature(std::size_t x, std::size_t y) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < rels_.size(); ++i)
      if (rels_[i].related(x, y)) s |= std::uint64_t{1} << i;
    return s;
  }

  EqRel const& of(std::size_t x, std::size_t y) {
    std::uint64_t const s = signature(x, y);
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    EqRel acc = EqRel::full(size_);
    for (std::size_t i = 0; i < rels_.size(); ++i)
      if (s >> i & 1) acc = part_meet(acc, rels_[i]);
    return memo_.emplace(s, std::move(acc)).first->second;
  }

 private:
  std::vector<EqRel> rels_;
  std::size_t size_;
  std::unordered_map<std::uint64_t, EqRel> memo_;
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> principal_inclusion_violations(
    LatticeTable const& table, std::span<const Transformation> maps) {
  for (auto const& f : maps)
    if (f.size() != table.size()) throw InvalidArgument("map on the wrong carrier");
  PrincipalIndex index(table);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x = 0; x < table.size(); ++x) {
    for (std::size_t y = x + 1; y < table.size(); ++y) {
      EqRel const& c = index.of(x, y);
      for (auto const& f : maps) {
        if (!c.related(f[x], f[y])) {
          out.emplace_back(x, y);
          break;
        }
      }
    }
  }
  return out;
}

// Homogeneity interpolants ----------------------------------------------

namespace {

struct Step {
  SearchStatus status = SearchStatus::not_found;
  Transformation map;
};

struct Exploration {
  static constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent;
  std::vector<std::size_t> via;  // index into maps, for reached nodes
  std::vector<Transformation> maps;
  bool unknown_edge = false;
  std::size_t steps = 0;

  bool reached(std::size_t z) const { return parent[z] != none; }
};

/// Breadth-first search from u through nodes of `region` in the interpolant
/// graph of the focused (x, y): {z, w} is an edge when some endomorphism
/// sends {x, y} onto it. Edges the step oracle knows for free are followed
/// first; when Steps::pairwise, the rest of the region is then probed pair
/// by pair, unreached targets first. Stops once every target is reached.
template <class Steps>
Exploration explore(std::size_t n, std::size_t u, std::vector<std::size_t> const& region,
                    std::vector<std::size_t> const& targets, Steps& steps, bool record) {
  Exploration ex;
  ex.parent.assign(n, Exploration::none);
  if (record) ex.via.assign(n, Exploration::none);
  ex.parent[u] = u;
  std::size_t remaining = 0;
  std::vector<char> is_target(n, 0), in_region(n, 0);
  for (std::size_t w : region) in_region[w] = 1;
  for (std::size_t t : targets)
    if (!is_target[t] && t != u) {
      is_target[t] = 1;
      ++remaining;
    }
  auto reach = [&](std::size_t z, std::size_t w, Transformation map) {
    ex.parent[w] = z;
    if (record) {
      ex.via[w] = ex.maps.size();
      ex.maps.push_back(std::move(map));
    }
    if (is_target[w]) --remaining;
  };

  std::deque<std::size_t> queue{u};
  std::vector<std::size_t> probe;  // reached nodes, in order of arrival
  auto drain = [&] {
    while (!queue.empty() && remaining > 0) {
      std::size_t const z = queue.front();
      queue.pop_front();
      probe.push_back(z);
      for (std::size_t w : steps.neighbours(z)) {
        if (!in_region[w] || ex.reached(w)) continue;
        reach(z, w, record ? steps(z, w).map : Transformation{});
        queue.push_back(w);
        if (remaining == 0) return;
      }
    }
  };
  drain();
  if constexpr (Steps::pairwise) {
    if (!steps.searching) {
      if (remaining > 0) ex.unknown_edge = true;
      return ex;
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < probe.size() && remaining > 0; ++i) {
      std::size_t const z = probe[i];
      order.clear();
      for (std::size_t t : targets)
        if (!ex.reached(t)) order.push_back(t);
      for (std::size_t w : region)
        if (!is_target[w] && !ex.reached(w)) order.push_back(w);
      for (std::size_t w : order) {
        if (ex.reached(w)) continue;
        ++ex.steps;
        Step s = steps(z, w);
        if (s.status == SearchStatus::budget_exhausted) ex.unknown_edge = true;
        if (s.status != SearchStatus::found) continue;
        reach(z, w, std::move(s.map));
        queue.push_back(w);
        drain();
        if (remaining == 0) break;
      }
    }
  }
  return ex;
}

HomogeneityCertificate certificate_from(Exploration const& ex, std::size_t x, std::size_t y,
                                        std::size_t u, std::size_t v) {
  HomogeneityCertificate c{x, y, u, v, {}, {}};
  for (std::size_t z = v; z != u; z = ex.parent[z]) {
    c.chain.push_back(z);
    c.maps.push_back(ex.maps[ex.via[z]]);
  }
  c.chain.push_back(u);
  std::reverse(c.chain.begin(), c.chain.end());
  std::reverse(c.maps.begin(), c.maps.end());
  return c;
}

std::uint64_t pair_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{static_cast<std::uint32_t>(a)} << 32) | static_cast<std::uint32_t>(b);
}

/// Step oracle backed by constrained searches.
///
/// Two shortcuts come first. Previously found maps are reused. And for a set
/// S of relations, if the join J_S does not relate x and y then
/// f(t) = (t ~J_S x ? z : w) is an endomorphism for every pair z, w related
/// by all relations outside S; so each maximal such S contributes the whole
/// equivalence M_S = meet of the relations outside S as free edges.
class SearchSteps {
 public:
  static constexpr bool pairwise = true;
  /// Probed pairs per focused (x, y), enough for every pair of a small
  /// table; later probes count as undecided.
  static std::size_t search_cap(std::size_t n) { return std::clamp<std::size_t>(2 * n * n, 256, 4096); }
  /// The cap covers every pair, so only per-search budgets leave gaps.
  bool exhaustive() const { return 2 * n_ * n_ <= search_cap(n_); }
  /// Relations beyond this count disable the subset shortcut.
  static constexpr std::size_t max_subset_relations = 10;

  SearchSteps(LatticeTable const& table, std::size_t budget)
      : searcher_(table), budget_(budget), n_(table.size()) {
    for (auto const& r : table.distinct_relations())
      if (!r.is_full() && !r.is_discrete()) rels_.push_back(r);
    if (rels_.size() <= max_subset_relations) {
      std::size_t const subsets = std::size_t{1} << rels_.size();
      joins_.reserve(subsets);
      joins_.push_back(EqRel::discrete(n_));
      for (std::size_t s = 1; s < subsets; ++s) {
        std::size_t const low = s & (~s + 1);
        std::size_t r = 0;
        while ((std::size_t{1} << r) != low) ++r;
        joins_.push_back(part_join(joins_[s ^ low], rels_[r]));
      }
    }
  }

  void focus(std::size_t x, std::size_t y) {
    x_ = x;
    y_ = y;
    index_.clear();
    failed_.clear();
    focus_searches_ = 0;
    for (std::size_t i = 0; i < known_.size(); ++i)
      index_.emplace(pair_key(known_[i][x], known_[i][y]), i);
    good_.clear();
    if (joins_.empty() || x == y) return;
    std::size_t const all = joins_.size() - 1;
    for (std::size_t s = 0; s <= all; ++s) {
      if (joins_[s].related(x, y)) continue;
      bool maximal = true;
      for (std::size_t r = 0; r < rels_.size() && maximal; ++r) {
        std::size_t const bit = std::size_t{1} << r;
        if (!(s & bit) && !joins_[s | bit].related(x, y)) maximal = false;
      }
      if (maximal) good_.push_back(s);
    }
  }

  std::vector<std::size_t> neighbours(std::size_t z) {
    std::vector<std::size_t> out;
    if (x_ != y_) {
      for (std::size_t s : good_) {
        Blocks const& b = blocks(s);
        for (Node w : b.members[b.rel.rep(static_cast<Node>(z))])
          if (w != z) out.push_back(w);
      }
    }
    for (auto const& f : known_) {
      if (f[x_] == z) out.push_back(f[y_]);
      if (f[y_] == z) out.push_back(f[x_]);
    }
    return out;
  }

  Step operator()(std::size_t z, std::size_t w) {
    if (auto it = index_.find(pair_key(z, w)); it != index_.end()) {
      return {SearchStatus::found, known_[it->second]};
    }
    if (z == w) return {SearchStatus::found, constant_map(n_, static_cast<Node>(z))};
    for (std::size_t s : good_) {
      if (!blocks(s).rel.related(static_cast<Node>(z), static_cast<Node>(w))) continue;
      EqRel const& j = joins_[s];
      Transformation f(n_);
      for (std::size_t t = 0; t < n_; ++t) f[t] = static_cast<Node>(j.related(t, x_) ? z : w);
      return {SearchStatus::found, std::move(f)};
    }
    if (auto it = failed_.find(pair_key(z, w)); it != failed_.end()) return {it->second, {}};
    if (focus_searches_ >= search_cap(n_)) return {SearchStatus::budget_exhausted, {}};
    Step s = search(z, w);
    if (s.status != SearchStatus::found) failed_.emplace(pair_key(z, w), s.status);
    return s;
  }

  std::size_t searches = 0;
  /// Off: no new searches, so missing edges stay undecided.
  bool searching = true;

 private:
  struct Blocks {
    EqRel rel;
    std::vector<std::vector<Node>> members;  // by representative
  };

  /// M_S: the meet of the relations outside S, with its blocks listed.
  Blocks const& blocks(std::size_t s) {
    auto it = meets_.find(s);
    if (it != meets_.end()) return it->second;
    EqRel m = EqRel::full(n_);
    for (std::size_t r = 0; r < rels_.size(); ++r)
      if (!(s & (std::size_t{1} << r))) m = part_meet(m, rels_[r]);
    Blocks b{std::move(m), std::vector<std::vector<Node>>(n_)};
    for (Node t = 0; t < n_; ++t) b.members[b.rel.rep(t)].push_back(t);
    return meets_.emplace(s, std::move(b)).first->second;
  }

  Step search(std::size_t z, std::size_t w) {
    bool exhausted = false;
    ++focus_searches_;
    for (int flip = 0; flip < 2; ++flip) {
      std::pair<Node, Node> const fixed[2] = {{static_cast<Node>(x_), static_cast<Node>(flip ? w : z)},
                                              {static_cast<Node>(y_), static_cast<Node>(flip ? z : w)}};
      ++searches;
      EndoSearch r = searcher_.find(fixed, budget_);
      if (r.status == SearchStatus::found) {
        remember(r.map);
        return {SearchStatus::found, std::move(r.map)};
      }
      if (r.status == SearchStatus::budget_exhausted) exhausted = true;
      if (x_ == y_) break;
    }
    return {exhausted ? SearchStatus::budget_exhausted : SearchStatus::not_found, {}};
  }

  void remember(Transformation const& f) {
    if (known_.size() >= max_known) return;
    known_.push_back(f);
    index_.emplace(pair_key(f[x_], f[y_]), known_.size() - 1);
  }

  static constexpr std::size_t max_known = 512;
  EndoSearcher searcher_;
  std::size_t budget_;
  std::size_t n_;
  std::size_t x_ = 0, y_ = 0;
  std::size_t focus_searches_ = 0;
  std::vector<EqRel> rels_;
  std::vector<EqRel> joins_;  // J_S by bitmask S; empty when there are too many relations
  std::unordered_map<std::size_t, Blocks> meets_;
  std::vector<std::size_t> good_;  // maximal S with J_S separating x and y
  std::vector<Transformation> known_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::unordered_map<std::uint64_t, SearchStatus> failed_;
};

/// Step oracle backed by a fixed list of maps; every edge is free.
class ListSteps {
 public:
  static constexpr bool pairwise = false;

  explicit ListSteps(std::span<const Transformation> maps) : maps_(maps) {}

  void focus(std::size_t x, std::size_t y) {
    index_.clear();
    adjacent_.clear();
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      Node const a = maps_[i][x], b = maps_[i][y];
      if (index_.emplace(pair_key(a, b), i).second && a != b) {
        adjacent_[a].push_back(b);
        adjacent_[b].push_back(a);
      }
    }
  }

  std::vector<std::size_t> neighbours(std::size_t z) const {
    auto it = adjacent_.find(z);
    if (it == adjacent_.end()) return {};
    return it->second;
  }

  Step operator()(std::size_t z, std::size_t w) const {
    auto it = index_.find(pair_key(z, w));
    if (it == index_.end()) return {};
    return {SearchStatus::found, maps_[it->second]};
  }

 private:
  std::span<const Transformation> maps_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> adjacent_;
};

void check_quadruple(LatticeTable const& table, std::size_t x, std::size_t y, std::size_t u,
                     std::size_t v) {
  std::size_t const n = table.size();
  if (x >= n || y >= n || u >= n || v >= n) throw InvalidArgument("node outside table");
  if (!principal_equivalence(table, x, y).related(u, v)) {
    throw InvalidArgument("premise fails: (u, v) is not in C(x, y)");
  }
}

template <class Steps>
InterpolantSearch interpolants_with(LatticeTable const& table, std::size_t x, std::size_t y,
                                    std::size_t u, std::size_t v, Steps& steps) {
  check_quadruple(table, x, y, u, v);
  InterpolantSearch out;
  std::size_t const n = table.size();
  if (u == v) {
    out.status = SearchStatus::found;
    out.certificate = {x, y, u, v, {u, v}, {constant_map(n, static_cast<Node>(u))}};
    return out;
  }
  EqRel const c = principal_equivalence(table, x, y);
  std::vector<std::size_t> region;
  for (std::size_t w = 0; w < n; ++w)
    if (c.related(u, w)) region.push_back(w);
  steps.focus(x, y);
  Exploration ex = explore(n, u, region, {v}, steps, true);
  out.visited = ex.steps;
  if (ex.reached(v)) {
    out.status = SearchStatus::found;
    out.certificate = certificate_from(ex, x, y, u, v);
  } else {
    out.status = ex.unknown_edge ? SearchStatus::budget_exhausted : SearchStatus::not_found;
  }
  return out;
}

}  // namespace

InterpolantSearch find_homogeneity_interpolants(LatticeTable const& table, std::size_t x,
                                                std::size_t y, std::size_t u, std::size_t v,
                                                std::size_t budget) {
  SearchSteps steps(table, budget);
  auto out = interpolants_with(table, x, y, u, v, steps);
  return out;
}

InterpolantSearch find_homogeneity_interpolants(LatticeTable const& table, std::size_t x,
                                                std::size_t y, std::size_t u, std::size_t v,
                                                std::span<const Transformation> maps) {
  for (auto const& f : maps)
    if (f.size() != table.size()) throw InvalidArgument("map on the wrong carrier");
  ListSteps steps(maps);
  return interpolants_with(table, x, y, u, v, steps);
}

bool recheck_certificate(LatticeTable const& table, HomogeneityCertificate const& cert,
                         std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  std::size_t const n = table.size();
  if (cert.x >= n || cert.y >= n || cert.u >= n || cert.v >= n) return fail("node outside table");
  if (!principal_equivalence(table, cert.x, cert.y).related(cert.u, cert.v)) {
    return fail("premise fails: (u, v) is not in C(x, y)");
  }
  if (cert.chain.size() < 2) return fail("chain needs at least two nodes");
  if (cert.chain.front() != cert.u || cert.chain.back() != cert.v) {
    return fail("chain does not run from u to v");
  }
  if (cert.maps.size() + 1 != cert.chain.size()) return fail("need one map per chain link");
  for (std::size_t i = 0; i < cert.maps.size(); ++i) {
    auto const& f = cert.maps[i];
    if (!is_endomorphism(table, f)) return fail("map " + std::to_string(i) + " is not an endomorphism");
    std::size_t const a = f[cert.x], b = f[cert.y];
    std::size_t const z0 = cert.chain[i], z1 = cert.chain[i + 1];
    if (!((a == z0 && b == z1) || (a == z1 && b == z0))) {
      return fail("map " + std::to_string(i) + " does not send {x, y} onto link " + std::to_string(i));
    }
  }
  return true;
}

// Sweeps ----------------------------------------------------------------

namespace {

template <class Steps>
HomogeneitySweep sweep_with(LatticeTable const& table, LatticeTable const& premise, Steps& steps,
                            std::size_t keep) {
  HomogeneitySweep out;
  std::size_t const n = table.size();
  std::size_t const m = premise.size();
  std::vector<std::size_t> pos(m);
  for (std::size_t i = 0; i < m; ++i) pos[i] = table.position(premise.nodes()[i]);
  PrincipalIndex small(premise), big(table);
  std::optional<std::array<std::size_t, 4>> first_refuted, first_unknown;

  // x = y: only u = v satisfies the premise, and a constant map certifies it.
  out.premise_quadruples += m * m;
  out.certified += m * m;

  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = x + 1; y < m; ++y) {
      EqRel const& c = small.of(x, y);
      std::size_t const bx = pos[x], by = pos[y];
      EqRel const& cbig = big.of(bx, by);
      bool focused = false;
      for (auto const& block : c.blocks()) {
        std::size_t const s = block.size();
        out.premise_quadruples += 2 * s * s;
        if (s == 1) {
          out.certified += 2;
          continue;
        }
        if (!focused) {
          steps.focus(bx, by);
          focused = true;
        }
        std::size_t const u = pos[block.front()];
        std::vector<std::size_t> targets, region;
        for (Node t : block) targets.push_back(pos[t]);
        for (std::size_t w = 0; w < n; ++w)
          if (cbig.related(u, w)) region.push_back(w);
        bool const record = out.certificates.size() < keep;
        Exploration ex = explore(n, u, region, targets, steps, record);
        std::size_t reached = 0;
        std::optional<std::size_t> missing;
        for (std::size_t t : targets) {
          if (ex.reached(t)) ++reached;
          else if (!missing) missing = t;
        }
        // Within one connected component every ordered pair is linked.
        out.certified += missing ? 2 * reached * reached + 2 * (s - reached) : 2 * s * s;
        if (record) {
          for (std::size_t t : targets) {
            if (t == u || !ex.reached(t) || out.certificates.size() >= keep) continue;
            out.certificates.push_back(certificate_from(ex, bx, by, u, t));
          }
        }
        if (missing) {
          std::array<std::size_t, 4> const w{bx, by, u, *missing};
          if (ex.unknown_edge) {
            if (!first_unknown) first_unknown = w;
            // The verdict can no longer be verified. On a table too large to
            // probe exhaustively a refutation is out of reach as well, so
            // later quadruples are only certified from maps at hand.
            if constexpr (Steps::pairwise)
              if (!steps.exhaustive()) steps.searching = false;
          } else if (!first_refuted) {
            first_refuted = w;
          }
        }
      }
    }
  }
  if (first_refuted) {
    out.verdict = Verdict::refuted;
    out.witness = first_refuted;
  } else if (first_unknown) {
    out.verdict = Verdict::unknown;
    out.witness = first_unknown;
  }
  return out;
}

}  // namespace

HomogeneitySweep homogeneity_sweep(LatticeTable const& table, LatticeTable const& premise,
                                   std::size_t search_budget, std::size_t keep_certificates) {
  if (!(table.labels() == premise.labels())) throw InvalidArgument("label lattices differ");
  SearchSteps steps(table, search_budget);
  auto out = sweep_with(table, premise, steps, keep_certificates);
  out.searches = steps.searches;
  return out;
}

MaltsevReport check_maltsev(LatticeTable const& table, MaltsevOptions const& opts) {
  MaltsevReport report;
  EndoResult endos = endomorphisms(table, opts.enumeration_budget);
  report.complete_enumeration = endos.complete;
  report.endomorphisms = endos.maps.size();
  HomogeneitySweep sweep;
  if (endos.complete) {
    ListSteps steps(endos.maps);
    sweep = sweep_with(table, table, steps, opts.keep_certificates);
    // With all of End Θ at hand a missing edge is a proof.
    if (sweep.verdict == Verdict::unknown) throw InternalError("complete enumeration left a gap");
  } else {
    SearchSteps steps(table, opts.search_budget);
    sweep = sweep_with(table, table, steps, opts.keep_certificates);
  }
  report.verdict = sweep.verdict;
  report.premise_quadruples = sweep.premise_quadruples;
  report.certified = sweep.certified;
  report.witness = sweep.witness;
  report.certificates = std::move(sweep.certificates);
  return report;
}

// JSON ------------------------------------------------------------------

nlohmann::json certificate_to_json(HomogeneityCertificate const& cert, LatticeTable const& table) {
  auto id = [&](std::size_t p) { return table.nodes().at(p); };
  nlohmann::json j;
  j["x"] = id(cert.x);
  j["y"] = id(cert.y);
  j["u"] = id(cert.u);
  j["v"] = id(cert.v);
  auto chain = nlohmann::json::array();
  for (std::size_t z : cert.chain) chain.push_back(id(z));
  j["chain"] = std::move(chain);
  auto maps = nlohmann::json::array();
  for (auto const& f : cert.maps) {
    auto images = nlohmann::json::array();
    for (Node v : f) images.push_back(id(v));
    maps.push_back(std::move(images));
  }
  j["maps"] = std::move(maps);
  return j;
}

HomogeneityCertificate certificate_from_json(nlohmann::json const& j, LatticeTable const& table) {
  auto pos = [&](nlohmann::json const& v) { return table.position(v.get<Node>()); };
  HomogeneityCertificate c;
  c.x = pos(j.at("x"));
  c.y = pos(j.at("y"));
  c.u = pos(j.at("u"));
  c.v = pos(j.at("v"));
  for (auto const& z : j.at("chain")) c.chain.push_back(pos(z));
  for (auto const& images : j.at("maps")) {
    if (images.size() != table.size()) throw InvalidArgument("certificate map has the wrong size");
    Transformation f;
    for (auto const& v : images) f.push_back(static_cast<Node>(pos(v)));
    c.maps.push_back(std::move(f));
  }
  return c;
}

}  // namespace lattab
