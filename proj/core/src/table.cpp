#include "lattab/table.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include <nlohmann/json.hpp>

#include "lattab/error.hpp"

namespace lattab {

char const* to_string(Verdict v) {
  switch (v) {
    case Verdict::verified: return "verified";
    case Verdict::refuted: return "refuted";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

char const* to_string(TableKind k) {
  switch (k) {
    case TableKind::lattice_table: return "lattice-table";
    case TableKind::usl_table: return "usl-table";
    case TableKind::invalid: return "invalid";
  }
  return "?";
}

char const* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::not_found: return "not-found";
    case SearchStatus::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

namespace {

std::vector<Node> iota_nodes(std::size_t n) {
  std::vector<Node> ids(n);
  for (Node i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

std::size_t carrier_of(std::vector<EqRel> const& rel) { return rel.empty() ? 0 : rel.front().size(); }

}  // namespace

LatticeTable::LatticeTable(FiniteLattice labels, std::vector<EqRel> const& rel)
    : LatticeTable(std::move(labels), iota_nodes(carrier_of(rel)), rel) {}

LatticeTable::LatticeTable(FiniteLattice labels, std::vector<Node> nodes, std::vector<EqRel> rel)
    : labels_(std::move(labels)), nodes_(std::move(nodes)), rel_(std::move(rel)) {
  if (nodes_.empty()) throw InvalidArgument("lattice table needs a nonempty carrier");
  if (rel_.size() != labels_.size()) {
    throw InvalidArgument("lattice table needs one relation per label");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (nodes_[i - 1] >= nodes_[i]) throw InvalidArgument("table node ids must be strictly increasing");
  for (auto const& r : rel_)
    if (r.size() != nodes_.size()) throw InvalidArgument("relation carrier differs from table carrier");
  if (!rel_[labels_.bottom()].is_full()) throw InvalidArgument("label 0 must carry the full relation");
  if (!rel_[labels_.top()].is_discrete()) throw InvalidArgument("label 1 must carry the diagonal");
  for (Elem a = 0; a < labels_.size(); ++a)
    for (Elem b = 0; b < labels_.size(); ++b)
      if (labels_.leq(a, b) && !rel_[b].subset_of(rel_[a])) {
        throw InvalidArgument("labelling is not order-reversing at (" + labels_.name(a) + ", " +
                              labels_.name(b) + ")");
      }
}

std::optional<std::size_t> LatticeTable::index_of(Node id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t LatticeTable::position(Node id) const {
  if (auto i = index_of(id)) return *i;
  throw InvalidArgument("node " + std::to_string(id) + " is not in the table");
}

std::vector<EqRel> LatticeTable::distinct_relations() const {
  std::vector<EqRel> out;
  for (auto const& r : rel_)
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  return out;
}

bool LatticeTable::labeling_injective() const { return distinct_relations().size() == rel_.size(); }

TableKindReport LatticeTable::kind() const {
  TableKindReport report;
  auto in_family = [&](EqRel const& r) { return std::find(rel_.begin(), rel_.end(), r) != rel_.end(); };
  for (Elem a = 0; a < labels_.size(); ++a) {
    for (Elem b = a + 1; b < labels_.size(); ++b) {
      if (!in_family(part_meet(rel_[a], rel_[b]))) {
        return {TableKind::invalid, "meet", a, b};
      }
    }
  }
  for (Elem a = 0; a < labels_.size(); ++a) {
    for (Elem b = a + 1; b < labels_.size(); ++b) {
      if (!in_family(part_join(rel_[a], rel_[b]))) {
        report = {TableKind::usl_table, "join", a, b};
        return report;
      }
    }
  }
  return report;
}

RestrictResult restrict_table(LatticeTable const& table, std::span<const Node> ids) {
  if (ids.empty()) throw InvalidArgument("cannot restrict a table to the empty set");
  std::vector<Node> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Node> positions;
  positions.reserve(sorted.size());
  for (Node id : sorted) positions.push_back(static_cast<Node>(table.position(id)));
  std::vector<EqRel> rel;
  rel.reserve(table.labels().size());
  for (auto const& r : table.relations()) rel.push_back(r.restrict(positions));
  LatticeTable out(table.labels(), std::move(sorted), std::move(rel));
  auto kind = out.kind();
  return {std::move(out), kind};
}

SubtableReport check_subtable(LatticeTable const& small, LatticeTable const& big) {
  if (!(small.labels() == big.labels())) {
    throw InvalidArgument("sub-table check needs identical label lattices");
  }
  SubtableReport report;
  std::vector<Node> positions;
  positions.reserve(small.size());
  for (Node id : small.nodes()) {
    auto i = big.index_of(id);
    if (!i) {
      report.ok = false;
      report.reason = "node " + std::to_string(id) + " missing from the larger carrier";
      report.x = report.y = id;
      return report;
    }
    positions.push_back(static_cast<Node>(*i));
  }
  for (Elem a = 0; a < small.labels().size(); ++a) {
    EqRel const restricted = big.rel(a).restrict(positions);
    EqRel const& own = small.rel(a);
    if (restricted == own) continue;
    for (Node x = 0; x < own.size(); ++x) {
      for (Node y : {own.rep(x), restricted.rep(x)}) {
        if (own.related(x, y) != restricted.related(x, y)) {
          report.ok = false;
          report.x = small.nodes()[x];
          report.y = small.nodes()[y];
          report.label = a;
          report.reason = "relation " + small.labels().name(a) + " disagrees on (" +
                          std::to_string(report.x) + ", " + std::to_string(report.y) + ")";
          return report;
        }
      }
    }
  }
  return report;
}

EqRel principal_equivalence(LatticeTable const& table, std::size_t x, std::size_t y) {
  if (x >= table.size() || y >= table.size()) throw InvalidArgument("node outside table");
  EqRel acc = EqRel::full(table.size());
  for (auto const& r : table.relations())
    if (r.related(x, y)) acc = part_meet(acc, r);
  return acc;
}

MeetInterpolants search_alternating_chain(LatticeTable const& table, Elem a, Elem b,
                                          std::size_t x, std::size_t y, std::size_t budget) {
  MeetInterpolants out;
  std::size_t const n = table.size();
  if (x >= n || y >= n) throw InvalidArgument("node outside table");
  if (x == y) {
    out.status = SearchStatus::found;
    return out;
  }
  EqRel const& ra = table.rel(a);
  EqRel const& rb = table.rel(b);
  auto members = [n](EqRel const& r) {
    std::vector<std::vector<std::size_t>> m(n);
    for (std::size_t z = 0; z < n; ++z) m[r.rep(z)].push_back(z);
    return m;
  };
  auto const blocks_a = members(ra);
  auto const blocks_b = members(rb);
  // State (z, p): reached z, next link uses a (p = 0) or b (p = 1).
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(2 * n, none);
  std::vector<char> seen(2 * n, 0), expanded_a(n, 0), expanded_b(n, 0);
  std::deque<std::size_t> queue;
  seen[2 * x] = 1;
  queue.push_back(2 * x);
  while (!queue.empty()) {
    std::size_t const state = queue.front();
    queue.pop_front();
    std::size_t const z = state / 2;
    bool const via_a = (state % 2) == 0;
    auto& expanded = via_a ? expanded_a : expanded_b;
    Node const block = via_a ? ra.rep(z) : rb.rep(z);
    if (expanded[block]) continue;
    expanded[block] = 1;
    for (std::size_t w : (via_a ? blocks_a : blocks_b)[block]) {
      std::size_t const next = 2 * w + (via_a ? 1 : 0);
      if (seen[next]) continue;
      if (++out.visited > budget) {
        out.status = SearchStatus::budget_exhausted;
        return out;
      }
      seen[next] = 1;
      parent[next] = state;
      if (w == y && !via_a) {
        std::vector<std::size_t> chain;
        for (std::size_t s = parent[next]; s != 2 * x; s = parent[s]) chain.push_back(s / 2);
        std::reverse(chain.begin(), chain.end());
        out.chain = std::move(chain);
        out.status = SearchStatus::found;
        return out;
      }
      queue.push_back(next);
    }
  }
  out.status = SearchStatus::not_found;
  return out;
}

MeetInterpolants find_meet_interpolants(LatticeTable const& table, Elem a, Elem b, std::size_t x,
                                        std::size_t y, std::size_t budget) {
  if (!table.labels().contains(a) || !table.labels().contains(b)) {
    throw InvalidArgument("unknown label");
  }
  if (x >= table.size() || y >= table.size()) throw InvalidArgument("node outside table");
  if (!table.related(table.labels().meet(a, b), x, y)) {
    throw InvalidArgument("meet interpolants need x ~ y under the meet of the two labels");
  }
  return search_alternating_chain(table, a, b, x, y, budget);
}

// JSON ------------------------------------------------------------------

nlohmann::json table_to_json(LatticeTable const& table) {
  nlohmann::json j;
  j["nodes"] = table.nodes();
  auto rels = nlohmann::json::object();
  for (Elem a = 0; a < table.labels().size(); ++a) {
    auto blocks = nlohmann::json::array();
    for (auto const& block : table.rel(a).blocks()) {
      auto ids = nlohmann::json::array();
      for (Node p : block) ids.push_back(table.nodes()[p]);
      blocks.push_back(std::move(ids));
    }
    rels[table.labels().name(a)] = std::move(blocks);
  }
  j["relations"] = std::move(rels);
  j["lattice"] = lattice_to_json(table.labels());
  return j;
}

LatticeTable table_from_json(nlohmann::json const& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("relations")) {
    throw InvalidArgument("table JSON needs 'nodes' and 'relations'");
  }
  std::vector<Node> nodes = j.at("nodes").get<std::vector<Node>>();
  std::vector<Node> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("duplicate node ids in table");
  }
  auto position = [&](Node id) -> Node {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
    if (it == sorted.end() || *it != id) throw InvalidArgument("relation mentions unknown node");
    return static_cast<Node>(it - sorted.begin());
  };
  std::map<std::string, EqRel> named;
  for (auto const& [name, blocks] : j.at("relations").items()) {
    std::vector<std::vector<Node>> local;
    for (auto const& block : blocks) {
      std::vector<Node> b;
      for (auto const& id : block) b.push_back(position(id.get<Node>()));
      local.push_back(std::move(b));
    }
    named.emplace(name, EqRel::from_blocks(sorted.size(), local));
  }
  FiniteLattice labels = [&] {
    if (j.contains("lattice")) return lattice_from_json(j.at("lattice"));
    std::vector<std::string> names;
    std::vector<EqRel const*> rels;
    for (auto const& [name, r] : named) {
      names.push_back(name);
      rels.push_back(&r);
    }
    std::vector<std::pair<Elem, Elem>> pairs;
    for (Elem a = 0; a < names.size(); ++a)
      for (Elem b = 0; b < names.size(); ++b)
        if (rels[b]->subset_of(*rels[a])) pairs.emplace_back(a, b);
    return make_lattice(std::move(names), pairs);
  }();
  std::vector<EqRel> rel;
  for (Elem a = 0; a < labels.size(); ++a) {
    auto it = named.find(labels.name(a));
    if (it == named.end()) throw InvalidArgument("no relation for label '" + labels.name(a) + "'");
    rel.push_back(it->second);
  }
  return LatticeTable(std::move(labels), std::move(sorted), std::move(rel));
}

}  // namespace lattab
