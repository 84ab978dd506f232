#include "lattab/pudlak.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lattab/algebra.hpp"
#include "lattab/error.hpp"

namespace lattab {

bool pentagon_admissible(FiniteLattice const& lattice, Elem alpha, Elem a1, Elem a2) {
  return a1 != lattice.top() && a2 != lattice.top() && lattice.leq(lattice.meet(a1, a2), alpha);
}

std::vector<PentagonPair> alpha_cell(FiniteLattice const& lattice, Elem alpha) {
  if (!lattice.contains(alpha)) throw InvalidArgument("unknown lattice element");
  if (alpha == lattice.top()) throw InvalidArgument("no cell for the top element");
  std::vector<PentagonPair> out;
  for (Elem a1 = 0; a1 < lattice.size(); ++a1)
    for (Elem a2 = 0; a2 < lattice.size(); ++a2)
      if (pentagon_admissible(lattice, alpha, a1, a2)) out.push_back({a1, a2});
  return out;
}

namespace {

std::uint64_t cell_key(std::uint32_t edge, std::uint32_t round, std::uint32_t copy) {
  return (std::uint64_t{edge} << 32) | (std::uint64_t{round} << 16) | copy;
}

}  // namespace

ColoredGraph::ColoredGraph(FiniteLattice lattice) : lattice_(std::move(lattice)) {
  if (!lattice_.nontrivial()) throw InvalidArgument("the lattice must be nontrivial");
  pairs_.resize(lattice_.size());
  for (Elem a = 0; a < lattice_.size(); ++a)
    if (a != lattice_.top()) pairs_[a] = alpha_cell(lattice_, a);
  origins_.resize(2);
  edges_.push_back({0, 1, lattice_.bottom(), 0, no_parent, 0, 0, 0});
  attached_.emplace_back();
  stages_.push_back({0, 0, 2, 1});
}

std::optional<CellRef> ColoredGraph::cell(std::uint32_t edge, std::uint32_t round,
                                          std::uint32_t copy) const {
  auto it = cells_.find(cell_key(edge, round, copy));
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

std::pair<std::size_t, std::size_t> ColoredGraph::projected_growth(std::uint32_t rounds,
                                                                   std::uint32_t copies) const {
  // Counted in doubles so that hopeless requests saturate instead of
  // overflowing.
  std::size_t const colors = lattice_.size();
  std::vector<std::vector<double>> fresh(rounds + 1, std::vector<double>(colors, 0.0));
  double nodes = 0, edges = 0;
  auto add = [&](std::uint32_t round, Elem color, double cells) {
    for (auto const& p : pairs_[color]) {
      nodes += 3 * cells;
      edges += 4 * cells;
      fresh[round][p.first] += 2 * cells;
      fresh[round][p.second] += 2 * cells;
    }
  };
  for (std::uint32_t r = 1; r <= rounds; ++r) {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      auto const& edge = edges_[e];
      if (edge.round >= r) continue;
      std::size_t const slot = r - edge.round - 1;
      std::uint32_t const have = slot < attached_[e].size() ? attached_[e][slot] : 0;
      if (copies > have) add(r, edge.color, copies - have);
    }
    for (std::uint32_t q = 1; q < r; ++q)
      for (Elem c = 0; c < colors; ++c)
        if (fresh[q][c] > 0) add(r, c, fresh[q][c] * copies);
  }
  constexpr double cap = 1e18;
  return {static_cast<std::size_t>(std::min(nodes, cap)), static_cast<std::size_t>(std::min(edges, cap))};
}

void ColoredGraph::attach(std::uint32_t e, std::uint32_t round, std::uint32_t copy) {
  ColoredEdge const base = edges_[e];
  cells_.emplace(cell_key(e, round, copy),
                 CellRef{static_cast<Node>(origins_.size()), static_cast<std::uint32_t>(edges_.size())});
  auto const& pairs = pairs_[base.color];
  for (std::uint32_t p = 0; p < pairs.size(); ++p) {
    Node const u1 = static_cast<Node>(origins_.size());
    for (std::uint32_t q = 1; q <= 3; ++q) origins_.push_back({e, round, copy, p, q});
    Node const chain[5] = {base.a, u1, u1 + 1, u1 + 2, base.b};
    Elem const colors[4] = {pairs[p].first, pairs[p].second, pairs[p].first, pairs[p].second};
    for (std::uint32_t link = 0; link < 4; ++link) {
      if (colors[link] == lattice_.top()) throw InternalError("edge colored 1");
      edges_.push_back({chain[link], chain[link + 1], colors[link], round, e, copy, p, link});
      attached_.emplace_back();
    }
  }
  auto& done = attached_[e];
  std::size_t const slot = round - base.round - 1;
  if (done.size() <= slot) done.resize(slot + 1, 0);
  if (done[slot] + 1 != copy) throw InternalError("cell copies attached out of order");
  done[slot] = copy;
}

void ColoredGraph::extend(std::uint32_t rounds, std::uint32_t copies, std::size_t node_budget) {
  if (rounds > 0xffff || copies > 0xffff) throw InvalidArgument("rounds and copies must be < 65536");
  auto [add_nodes, add_edges] = projected_growth(rounds, copies);
  (void)add_edges;
  if (add_nodes > node_budget || origins_.size() + add_nodes > node_budget) {
    throw BudgetExceeded("extension to " + std::to_string(rounds) + " rounds x " + std::to_string(copies) +
                             " copies needs " + std::to_string(origins_.size() + add_nodes) + " nodes",
                         node_budget);
  }
  for (std::uint32_t r = 1; r <= rounds; ++r) {
    std::size_t const existing = edges_.size();
    for (std::size_t e = 0; e < existing; ++e) {
      if (edges_[e].round >= r) continue;
      std::size_t const slot = r - edges_[e].round - 1;
      std::uint32_t const have = slot < attached_[e].size() ? attached_[e][slot] : 0;
      for (std::uint32_t k = have + 1; k <= copies; ++k) attach(static_cast<std::uint32_t>(e), r, k);
    }
  }
  StageMark mark{rounds, copies, origins_.size(), edges_.size()};
  if (!stages_.empty()) {
    mark.rounds = std::max(mark.rounds, stages_.back().rounds);
    mark.copies = std::max(mark.copies, stages_.back().copies);
  }
  stages_.push_back(mark);
}

ColoredGraph build_staged(FiniteLattice const& lattice,
                          std::vector<std::pair<std::uint32_t, std::uint32_t>> const& steps,
                          std::size_t node_budget) {
  ColoredGraph g(lattice);
  for (auto [rounds, copies] : steps) g.extend(rounds, copies, node_budget);
  return g;
}

ColoredGraph build_pudlak(FiniteLattice const& lattice, std::size_t n, std::size_t node_budget) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> steps;
  for (std::uint32_t j = 1; j <= n; ++j) steps.emplace_back(j, 1);
  return build_staged(lattice, steps, node_budget);
}

ColoredGraph build_homogenized(FiniteLattice const& lattice, std::size_t n, std::size_t node_budget) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> steps;
  for (std::uint32_t j = 1; j <= n; ++j) steps.emplace_back(j, j);
  return build_staged(lattice, steps, node_budget);
}

EqRel color_connectivity(ColoredGraph const& graph, Elem alpha, std::size_t stage) {
  StageMark const& mark = graph.stage(stage);
  if (!graph.lattice().contains(alpha)) throw InvalidArgument("unknown lattice element");
  UnionFind uf(mark.nodes);
  auto const& edges = graph.edges();
  for (std::size_t e = 0; e < mark.edges; ++e)
    if (graph.lattice().leq(alpha, edges[e].color)) uf.unite(edges[e].a, edges[e].b);
  return EqRel::from_union_find(uf);
}

LatticeTable table_of(ColoredGraph const& graph, std::size_t stage) {
  std::vector<EqRel> rel;
  for (Elem a = 0; a < graph.lattice().size(); ++a) rel.push_back(color_connectivity(graph, a, stage));
  return LatticeTable(graph.lattice(), std::move(rel));
}

std::vector<GrowthRow> growth_stats(ColoredGraph const& graph) {
  std::vector<GrowthRow> rows;
  std::vector<std::size_t> hist(graph.lattice().size(), 0);
  std::size_t counted = 0;
  for (std::size_t s = 0; s < graph.stages().size(); ++s) {
    auto const& mark = graph.stage(s);
    for (; counted < mark.edges; ++counted) ++hist[graph.edges()[counted].color];
    rows.push_back({s, mark.rounds, mark.copies, mark.nodes, mark.edges, hist});
  }
  return rows;
}

// Representation --------------------------------------------------------

namespace {

std::vector<Node> prefix(std::size_t n) {
  std::vector<Node> ids(n);
  for (Node i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

StageCheck check_stage(ColoredGraph const& graph, std::size_t stage, bool has_next) {
  FiniteLattice const& L = graph.lattice();
  std::size_t const k = L.size();
  StageCheck c;
  c.stage = stage;
  c.nodes = graph.stage(stage).nodes;
  c.edges = graph.stage(stage).edges;
  std::vector<EqRel> e, next;
  for (Elem a = 0; a < k; ++a) e.push_back(color_connectivity(graph, a, stage));
  if (has_next)
    for (Elem a = 0; a < k; ++a) next.push_back(color_connectivity(graph, a, stage + 1));
  auto note = [&](std::string const& what) {
    if (c.detail.empty()) c.detail = what;
  };

  c.injective = true;
  for (Elem a = 0; a < k && c.injective; ++a)
    for (Elem b = a + 1; b < k; ++b)
      if (e[a] == e[b]) {
        c.injective = false;
        note("(a) e(" + L.name(a) + ") = e(" + L.name(b) + ")");
        break;
      }

  c.order = c.join_to_meet = c.meet_to_join_local = true;
  bool meet_next = has_next;
  std::vector<Node> const ids = prefix(c.nodes);
  for (Elem a = 0; a < k; ++a) {
    for (Elem b = 0; b < k; ++b) {
      if (L.leq(a, b) != e[b].subset_of(e[a])) {
        if (c.order) note("(b) order fails at (" + L.name(a) + ", " + L.name(b) + ")");
        c.order = false;
      }
      if (b <= a) continue;
      if (!(e[L.join(a, b)] == part_meet(e[a], e[b]))) {
        if (c.join_to_meet) note("(c) e(" + L.name(a) + " v " + L.name(b) + ") differs from the intersection");
        c.join_to_meet = false;
      }
      EqRel const& lower = e[L.meet(a, b)];
      if (!(lower == part_join(e[a], e[b]))) c.meet_to_join_local = false;
      if (has_next && meet_next) {
        EqRel const joined = part_join(next[a], next[b]).restrict(ids);
        if (!(lower == joined)) {
          meet_next = false;
          note("(d) e(" + L.name(a) + " ^ " + L.name(b) + ") is not the join of e(" + L.name(a) +
               "), e(" + L.name(b) + ") within the next stage");
        }
      }
    }
  }
  if (has_next) c.meet_to_join = meet_next;
  else note("(d) needs the next stage, which is over budget");
  return c;
}

}  // namespace

RepresentationReport verify_representation(FiniteLattice const& lattice, RepresentationOptions const& opts) {
  RepresentationReport report;
  ColoredGraph graph(lattice);
  auto grow = [&](std::size_t j) {
    auto const r = static_cast<std::uint32_t>(j);
    graph.extend(r, opts.homogenized ? r : 1, opts.node_budget);
  };
  for (std::size_t n = 0; n <= opts.max_stage; ++n) {
    bool has_next = true;
    try {
      if (graph.stages().size() < n + 2) grow(n + 1);
    } catch (BudgetExceeded const&) {
      has_next = false;
      report.budget_exhausted = true;
    }
    report.stages.push_back(check_stage(graph, n, has_next));
    if (report.stages.back().passed()) {
      report.stage = n;
      break;
    }
    if (!has_next) break;
  }
  if (report.stage) {
    LatticeTable const table = table_of(graph, *report.stage);
    EndoResult endos = endomorphisms(table, opts.endo_budget);
    auto const members = table.distinct_relations();
    report.diagnostic.checked = true;
    report.diagnostic.exact = endos.complete;
    std::size_t const n = table.size();
    constexpr std::size_t samples = 16;
    for (std::size_t i = 0; i < samples && i + 1 < n * n; ++i) {
      std::size_t const x = (i * 7) % n, y = (i * 13 + 1) % n;
      if (x == y) continue;
      auto pc = principal_congruence(table, x, y, endos);
      ++report.diagnostic.sampled;
      if (std::find(members.begin(), members.end(), pc.relation) == members.end()) ++report.diagnostic.outside;
    }
  }
  return report;
}

// Serialization ---------------------------------------------------------

nlohmann::json graph_to_json(ColoredGraph const& graph) {
  using nlohmann::json;
  FiniteLattice const& L = graph.lattice();
  json j;
  j["lattice"] = lattice_to_json(L);
  auto stages = json::array();
  for (auto const& m : graph.stages())
    stages.push_back({{"rounds", m.rounds}, {"copies", m.copies}, {"nodes", m.nodes}, {"edges", m.edges}});
  j["stages"] = std::move(stages);
  auto nodes = json::array();
  for (Node x = 0; x < graph.node_count(); ++x) {
    auto const& o = graph.origin(x);
    json n{{"id", x}};
    if (o.edge == no_parent) {
      n["edge"] = nullptr;
    } else {
      n["edge"] = o.edge;
      n["round"] = o.round;
      n["copy"] = o.copy;
      n["pentagon"] = o.pentagon;
      n["position"] = o.position;
    }
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  auto edges = json::array();
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    auto const& d = graph.edges()[e];
    json x{{"id", e}, {"a", d.a}, {"b", d.b}, {"color", L.name(d.color)}, {"round", d.round}};
    if (d.parent == no_parent) {
      x["parent"] = nullptr;
    } else {
      x["parent"] = d.parent;
      x["copy"] = d.copy;
      x["pentagon"] = d.pentagon;
      x["link"] = d.link;
    }
    edges.push_back(std::move(x));
  }
  j["edges"] = std::move(edges);
  return j;
}

ColoredGraph graph_from_json(nlohmann::json const& j, std::size_t node_budget) {
  if (!j.is_object() || !j.contains("lattice") || !j.contains("stages")) {
    throw InvalidArgument("graph JSON needs 'lattice' and 'stages'");
  }
  FiniteLattice L = lattice_from_json(j.at("lattice"));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> steps;
  auto const& stages = j.at("stages");
  for (std::size_t i = 1; i < stages.size(); ++i) {
    steps.emplace_back(stages[i].at("rounds").get<std::uint32_t>(), stages[i].at("copies").get<std::uint32_t>());
  }
  ColoredGraph g = build_staged(L, steps, node_budget);
  nlohmann::json const rebuilt = graph_to_json(g);
  for (char const* key : {"stages", "nodes", "edges"}) {
    if (j.contains(key) && j.at(key) != rebuilt.at(key)) {
      throw InvalidArgument(std::string("graph JSON '") + key + "' does not match its construction");
    }
  }
  return g;
}

std::string graph_to_dot(ColoredGraph const& graph, std::size_t stage) {
  static char const* const palette[] = {"black", "red", "blue", "darkgreen", "orange", "purple", "brown", "gray"};
  StageMark const& mark = graph.stage(stage);
  std::ostringstream out;
  out << "graph G {\n";
  for (Node x = 0; x < mark.nodes; ++x) out << "  n" << x << ";\n";
  for (std::size_t e = 0; e < mark.edges; ++e) {
    auto const& d = graph.edges()[e];
    out << "  n" << d.a << " -- n" << d.b << " [label=\"" << graph.lattice().name(d.color) << "\", color=\""
        << palette[d.color % std::size(palette)] << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace lattab
