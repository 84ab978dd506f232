#include "lattab/morphism.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lattab/error.hpp"

namespace lattab {

PlainColoredGraph recolor(ColoredGraph const& graph, UslHom const& phi, std::size_t stage) {
  if (!(graph.lattice() == phi.target())) throw InvalidArgument("graph is not colored by the target of phi");
  std::vector<Elem> const adj = galois_adjoint(phi);
  StageMark const& mark = graph.stage(stage);
  PlainColoredGraph out{phi.source(), mark.nodes, {}};
  out.edges.assign(graph.edges().begin(), graph.edges().begin() + static_cast<std::ptrdiff_t>(mark.edges));
  for (auto& e : out.edges) {
    e.color = adj[e.color];
    if (e.color == out.lattice.top()) throw InternalError("recoloring produced color 1");
  }
  return out;
}

LatticeTable table_of(PlainColoredGraph const& graph) {
  std::vector<EqRel> rel;
  for (Elem a = 0; a < graph.lattice.size(); ++a) {
    UnionFind uf(graph.nodes);
    for (auto const& e : graph.edges)
      if (graph.lattice.leq(a, e.color)) uf.unite(e.a, e.b);
    rel.push_back(EqRel::from_union_find(uf));
  }
  return LatticeTable(graph.lattice, std::move(rel));
}

std::size_t TableEmbedding::required_stage(std::size_t mark) const {
  return std::max<std::size_t>(source.stage(mark).rounds, copies_needed.at(mark));
}

namespace {

std::vector<Elem> checked_adjoint(UslHom const& phi) {
  std::vector<Elem> adj = galois_adjoint(phi);
  if (adj[phi.target().bottom()] != phi.source().bottom()) {
    throw InvalidArgument("embedding needs phi*(0) = 0 so the base edge keeps color 0");
  }
  return adj;
}

/// target_pentagon[β][p]: index of (φ*β1, φ*β2) in the φ*β-cell of L⁰.
std::vector<std::vector<std::uint32_t>> pentagon_images(UslHom const& phi, std::vector<Elem> const& adj) {
  FiniteLattice const& L0 = phi.source();
  FiniteLattice const& L1 = phi.target();
  std::vector<std::vector<std::uint32_t>> out(L1.size());
  for (Elem b = 0; b < L1.size(); ++b) {
    if (b == L1.top()) continue;
    auto const src = alpha_cell(L1, b);
    auto const dst = alpha_cell(L0, adj[b]);
    for (auto const& p : src) {
      PentagonPair const want{adj[p.first], adj[p.second]};
      auto it = std::find(dst.begin(), dst.end(), want);
      if (it == dst.end()) throw InternalError("image pentagon missing from the target cell");
      out[b].push_back(static_cast<std::uint32_t>(it - dst.begin()));
    }
  }
  return out;
}

}  // namespace

TableEmbedding embed_graph(UslHom const& phi, ColoredGraph source, std::size_t node_budget,
                           std::vector<std::uint32_t> const& min_copies) {
  if (!(source.lattice() == phi.target())) throw InvalidArgument("source graph is not colored by the target of phi");
  std::vector<Elem> adj = checked_adjoint(phi);
  auto const images = pentagon_images(phi, adj);

  // Copy slots, counted per (source edge, round, target pentagon); the edge
  // map is injective so this equals counting per image edge.
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::uint32_t> counters;
  std::vector<std::uint32_t> slot_of(source.node_count(), 0);
  std::vector<CopyAllocation> allocation;
  std::vector<std::uint32_t> needed(source.stages().size(), 0);
  std::uint32_t running = 0;
  std::size_t mark = 0;
  for (Node x = 0; x < source.node_count(); ++x) {
    while (mark < source.stages().size() && source.stage(mark).nodes <= x) needed[mark++] = running;
    auto const& o = source.origin(x);
    if (o.position != 1) continue;
    Elem const beta = source.edges()[o.edge].color;
    std::uint32_t const tp = images[beta][o.pentagon];
    std::uint32_t const slot = ++counters[{o.edge, o.round, tp}];
    slot_of[x] = slot;
    running = std::max(running, slot);
    allocation.push_back({o.edge, o.round, o.copy, o.pentagon, tp, slot});
  }
  while (mark < source.stages().size()) needed[mark++] = running;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> steps;
  std::uint32_t copies = 0;
  for (std::size_t j = 1; j < source.stages().size(); ++j) {
    copies = std::max(copies, needed[j]);
    if (j < min_copies.size()) copies = std::max(copies, min_copies[j]);
    steps.emplace_back(source.stage(j).rounds, copies);
  }
  ColoredGraph target = build_staged(phi.source(), steps, node_budget);

  std::vector<Node> node_map(source.node_count());
  node_map[0] = 0;
  node_map[1] = 1;
  std::vector<std::uint32_t> edge_map(source.edge_count());
  edge_map[0] = 0;
  auto target_cell = [&](std::uint32_t edge, std::uint32_t round, std::uint32_t slot) {
    auto c = target.cell(edge_map[edge], round, slot);
    if (!c) throw InternalError("target cell missing for an allocated slot");
    return *c;
  };
  // Edges first: a cell is located through the image of its base edge.
  for (std::uint32_t e = 1; e < source.edge_count(); ++e) {
    auto const& d = source.edges()[e];
    auto const src_cell = source.cell(d.parent, d.round, d.copy);
    if (!src_cell) throw InternalError("source cell missing");
    Node const u1 = src_cell->first_node + 3 * d.pentagon;
    Elem const beta = source.edges()[d.parent].color;
    auto const cell = target_cell(d.parent, d.round, slot_of[u1]);
    edge_map[e] = cell.first_edge + 4 * images[beta][d.pentagon] + d.link;
  }
  for (Node x = 2; x < source.node_count(); ++x) {
    auto const& o = source.origin(x);
    Node const u1 = x - (o.position - 1);
    Elem const beta = source.edges()[o.edge].color;
    auto const cell = target_cell(o.edge, o.round, slot_of[u1]);
    node_map[x] = cell.first_node + 3 * images[beta][o.pentagon] + (o.position - 1);
  }
  return TableEmbedding{phi,     std::move(adj),      std::move(source),       std::move(target),
                        std::move(node_map), std::move(edge_map), std::move(allocation), std::move(needed)};
}

TableEmbedding embed_homogenized(UslHom const& phi, std::size_t n, std::size_t node_budget) {
  return embed_graph(phi, build_homogenized(phi.target(), n, node_budget), node_budget);
}

std::size_t required_stage_formula(UslHom const& phi, std::size_t n) {
  if (n == 0) return 0;
  FiniteLattice const& L1 = phi.target();
  std::vector<Elem> const adj = checked_adjoint(phi);
  auto const images = pentagon_images(phi, adj);
  std::vector<char> present(L1.size(), 0);
  present[L1.bottom()] = 1;
  for (std::size_t r = 1; r < n; ++r) {
    auto next = present;
    for (Elem b = 0; b < L1.size(); ++b) {
      if (!present[b] || b == L1.top()) continue;
      for (auto const& p : alpha_cell(L1, b)) next[p.first] = next[p.second] = 1;
    }
    present = std::move(next);
  }
  std::size_t collisions = 0;
  for (Elem b = 0; b < L1.size(); ++b) {
    if (!present[b] || b == L1.top()) continue;
    std::map<std::uint32_t, std::size_t> count;
    for (std::uint32_t tp : images[b]) collisions = std::max(collisions, ++count[tp]);
  }
  return std::max(n, n * collisions);
}

// Verification ----------------------------------------------------------

namespace {

/// First x whose classes under p and q differ, with a partner y.
std::optional<std::pair<Node, Node>> disagreement(EqRel const& p, EqRel const& q) {
  for (Node x = 0; x < p.size(); ++x) {
    for (Node y : {p.rep(x), q.rep(x)})
      if (p.related(x, y) != q.related(x, y)) return std::pair{x, y};
  }
  return std::nullopt;
}

}  // namespace

EmbeddingReport verify_embedding(TableEmbedding const& emb) {
  EmbeddingReport r;
  auto note = [&](std::string const& what) {
    if (r.detail.empty()) r.detail = what;
  };
  ColoredGraph const& S = emb.source;
  ColoredGraph const& T = emb.target;
  std::size_t const n = S.node_count();

  if (emb.node_map.size() != n || emb.edge_map.size() != S.edge_count()) {
    r.injective = r.colors = r.subtable = r.label_transport = false;
    note("node or edge map has the wrong length");
    return r;
  }
  std::vector<char> hit(T.node_count(), 0);
  for (Node x = 0; x < n; ++x) {
    Node const y = emb.node_map[x];
    if (y >= T.node_count() || hit[y]) {
      r.injective = false;
      note("node map is not injective at source node " + std::to_string(x));
      break;
    }
    hit[y] = 1;
  }
  if (emb.edge_map[0] != 0 || emb.node_map[0] != 0 || emb.node_map[1] != 1) {
    r.base_edge = false;
    note("base edge is not sent to the base edge");
  }
  for (std::size_t e = 0; e < S.edge_count() && r.colors; ++e) {
    auto const& d = S.edges()[e];
    std::uint32_t const te = emb.edge_map[e];
    if (te >= T.edge_count()) {
      r.colors = false;
      r.witness_edge = static_cast<std::uint32_t>(e);
      note("edge " + std::to_string(e) + " maps outside the target");
      break;
    }
    auto const& t = T.edges()[te];
    Node const a = emb.node_map[d.a], b = emb.node_map[d.b];
    bool const ends = (t.a == a && t.b == b) || (t.a == b && t.b == a);
    if (!ends || t.color != emb.adjoint[d.color]) {
      r.colors = false;
      r.witness_edge = static_cast<std::uint32_t>(e);
      note("edge " + std::to_string(e) + " is not sent to an edge colored phi*(" + S.lattice().name(d.color) + ")");
    }
  }
  if (!r.injective) {
    r.subtable = r.label_transport = false;
    return r;
  }

  // Table of the recolored source, carried to target ids.
  LatticeTable const target_table = table_of(T, T.stages().size() - 1);
  {
    LatticeTable const recolored = table_of(recolor(S, emb.phi, S.stages().size() - 1));
    std::vector<Node> order(n);
    std::iota(order.begin(), order.end(), Node{0});
    std::sort(order.begin(), order.end(), [&](Node a, Node b) { return emb.node_map[a] < emb.node_map[b]; });
    std::vector<Node> ids;
    for (Node x : order) ids.push_back(emb.node_map[x]);
    std::vector<EqRel> rel;
    for (auto const& p : recolored.relations()) rel.push_back(p.restrict(order));
    LatticeTable const image(recolored.labels(), std::move(ids), std::move(rel));
    auto sub = check_subtable(image, target_table);
    if (!sub.ok) {
      r.subtable = false;
      note("recolored source is not a sub-table of the target: " + sub.reason);
    }
  }

  LatticeTable const source_table = table_of(S, S.stages().size() - 1);
  FiniteLattice const& L0 = emb.phi.source();
  for (Elem a = 0; a < L0.size(); ++a) {
    EqRel const& lhs = source_table.rel(emb.phi(a));
    EqRel const rhs = target_table.rel(a).restrict(emb.node_map);
    r.pairs_checked += n * n;
    if (auto d = disagreement(lhs, rhs)) {
      r.label_transport = false;
      if (!r.witness_label) {
        r.witness_x = d->first;
        r.witness_y = d->second;
        r.witness_label = a;
        note("labels not transported for source nodes (" + std::to_string(d->first) + ", " + std::to_string(d->second) +
             ") at " + L0.name(a));
      }
    }
  }
  return r;
}

// Serialization ---------------------------------------------------------

namespace {

nlohmann::json steps_json(ColoredGraph const& g) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 1; i < g.stages().size(); ++i) out.push_back({g.stage(i).rounds, g.stage(i).copies});
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> steps_from(nlohmann::json const& j) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (auto const& s : j) out.emplace_back(s.at(0).get<std::uint32_t>(), s.at(1).get<std::uint32_t>());
  return out;
}

nlohmann::json hom_json(UslHom const& phi) {
  nlohmann::json j;
  j["source"] = lattice_to_json(phi.source());
  j["target"] = lattice_to_json(phi.target());
  auto map = nlohmann::json::object();
  for (Elem a = 0; a < phi.source().size(); ++a) map[phi.source().name(a)] = phi.target().name(phi(a));
  j["map"] = std::move(map);
  return j;
}

UslHom hom_from(nlohmann::json const& j) {
  FiniteLattice src = lattice_from_json(j.at("source"));
  FiniteLattice dst = lattice_from_json(j.at("target"));
  std::vector<Elem> map(src.size());
  for (Elem a = 0; a < src.size(); ++a) map[a] = dst.at(j.at("map").at(src.name(a)).get<std::string>());
  return UslHom(std::move(src), std::move(dst), std::move(map));
}

}  // namespace

nlohmann::json embedding_to_json(TableEmbedding const& emb) {
  nlohmann::json j;
  j["phi"] = hom_json(emb.phi);
  j["source_stages"] = steps_json(emb.source);
  j["target_stages"] = steps_json(emb.target);
  j["node_map"] = emb.node_map;
  j["edge_map"] = emb.edge_map;
  auto alloc = nlohmann::json::array();
  for (auto const& a : emb.allocation)
    alloc.push_back({a.source_edge, a.round, a.source_copy, a.source_pentagon, a.target_pentagon, a.slot});
  j["allocation"] = std::move(alloc);
  j["copies_needed"] = emb.copies_needed;
  return j;
}

TableEmbedding embedding_from_json(nlohmann::json const& j, std::size_t node_budget) {
  UslHom phi = hom_from(j.at("phi"));
  std::vector<Elem> adj = checked_adjoint(phi);
  ColoredGraph source = build_staged(phi.target(), steps_from(j.at("source_stages")), node_budget);
  ColoredGraph target = build_staged(phi.source(), steps_from(j.at("target_stages")), node_budget);
  std::vector<CopyAllocation> alloc;
  for (auto const& a : j.at("allocation")) {
    alloc.push_back({a.at(0).get<std::uint32_t>(), a.at(1).get<std::uint32_t>(), a.at(2).get<std::uint32_t>(),
                     a.at(3).get<std::uint32_t>(), a.at(4).get<std::uint32_t>(), a.at(5).get<std::uint32_t>()});
  }
  return TableEmbedding{std::move(phi),
                        std::move(adj),
                        std::move(source),
                        std::move(target),
                        j.at("node_map").get<std::vector<Node>>(),
                        j.at("edge_map").get<std::vector<std::uint32_t>>(),
                        std::move(alloc),
                        j.value("copies_needed", std::vector<std::uint32_t>{})};
}

// Assembly --------------------------------------------------------------

std::size_t padded_index(std::vector<std::size_t> const& marks, std::size_t k) {
  if (marks.empty()) throw InvalidArgument("no marks");
  for (std::size_t i = 1; i < marks.size(); ++i)
    if (marks[i] <= marks[i - 1]) throw InvalidArgument("marks must be increasing");
  if (k < marks.front()) throw InvalidArgument("index precedes the first mark");
  auto it = std::upper_bound(marks.begin(), marks.end(), k);
  return static_cast<std::size_t>(it - marks.begin()) - 1;
}

LatticeTable const& SystemAssembly::table(std::size_t level, std::size_t k) const {
  return tables.at(level).at(padded_index(composite.at(level), k));
}

namespace {

/// Nodes and edges of the sub-build with at most `rounds` rounds and
/// `copies` copies, ancestors included.
std::pair<std::vector<char>, std::vector<char>> sub_build(ColoredGraph const& g, std::uint32_t rounds,
                                                          std::uint32_t copies) {
  std::vector<char> edge_in(g.edge_count(), 0), node_in(g.node_count(), 0);
  auto const& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto const& d = edges[e];
    edge_in[e] = d.parent == no_parent || (d.round <= rounds && d.copy <= copies && edge_in[d.parent]);
  }
  for (Node x = 0; x < g.node_count(); ++x) {
    auto const& o = g.origin(x);
    node_in[x] = o.edge == no_parent || (o.round <= rounds && o.copy <= copies && edge_in[o.edge]);
  }
  return {std::move(node_in), std::move(edge_in)};
}

/// Table of a sub-build computed inside it, carried along `to_base`.
LatticeTable sub_table(ColoredGraph const& g, std::vector<char> const& node_in, std::vector<char> const& edge_in,
                       std::vector<Node> const& to_base) {
  FiniteLattice const& L = g.lattice();
  std::vector<Node> members;
  for (Node x = 0; x < g.node_count(); ++x)
    if (node_in[x]) members.push_back(x);
  std::sort(members.begin(), members.end(), [&](Node a, Node b) { return to_base[a] < to_base[b]; });
  std::vector<Node> ids;
  for (Node x : members) ids.push_back(to_base[x]);
  std::vector<EqRel> rel;
  for (Elem a = 0; a < L.size(); ++a) {
    UnionFind uf(g.node_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      auto const& d = g.edges()[e];
      if (edge_in[e] && L.leq(a, d.color)) uf.unite(d.a, d.b);
    }
    std::vector<std::uint32_t> labels;
    for (Node x : members) labels.push_back(uf.find(x));
    rel.push_back(EqRel::from_labels(labels));
  }
  return LatticeTable(L, std::move(ids), std::move(rel));
}

}  // namespace

SystemAssembly assemble_system(std::vector<UslHom> const& homs, std::size_t stages, std::size_t node_budget) {
  SystemAssembly sys;
  if (homs.empty()) throw InvalidArgument("assembly needs at least one homomorphism");
  for (std::size_t i = 0; i + 1 < homs.size(); ++i)
    if (!(homs[i].target() == homs[i + 1].source())) throw InvalidArgument("homomorphisms do not compose");
  std::size_t const k = homs.size();
  sys.homs = homs;
  sys.stages = stages;
  sys.lattices.push_back(homs[0].source());
  for (auto const& phi : homs) sys.lattices.push_back(phi.target());

  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> row;
    for (std::size_t n = 0; n <= stages; ++n) row.push_back(required_stage_formula(homs[i], n));
    sys.m.push_back(std::move(row));
    sys.h.push_back(sys.m[i][0]);
  }
  sys.h.push_back(0);
  for (std::size_t i = 0; i <= k; ++i) {
    std::vector<std::size_t> row;
    for (std::size_t j = 0; j <= stages; ++j) {
      std::size_t v = j;
      for (std::size_t l = i; l-- > 0;) v = required_stage_formula(homs[l], v);
      row.push_back(v);
    }
    sys.composite.push_back(std::move(row));
  }

  // Levels from the top down: each lower graph receives the one above and
  // also carries its own homogenized stages.
  sys.graphs.resize(k + 1, ColoredGraph(sys.lattices[0]));
  sys.graphs[k] = build_homogenized(sys.lattices[k], stages, node_budget);
  std::vector<TableEmbedding> down(k, TableEmbedding{homs[0], {}, ColoredGraph(sys.lattices[0]),
                                                     ColoredGraph(sys.lattices[0]), {}, {}, {}, {}});
  for (std::size_t i = k; i-- > 0;) {
    std::vector<std::uint32_t> own(stages + 1);
    for (std::size_t j = 0; j <= stages; ++j) own[j] = static_cast<std::uint32_t>(j);
    down[i] = embed_graph(homs[i], sys.graphs[i + 1], node_budget, own);
    sys.graphs[i] = down[i].target;
  }
  sys.embeddings = std::move(down);

  sys.to_base.resize(k + 1);
  sys.to_base[0].resize(sys.graphs[0].node_count());
  std::iota(sys.to_base[0].begin(), sys.to_base[0].end(), Node{0});
  for (std::size_t i = 1; i <= k; ++i) {
    auto const& map = sys.embeddings[i - 1].node_map;
    sys.to_base[i].resize(map.size());
    for (Node x = 0; x < map.size(); ++x) sys.to_base[i][x] = sys.to_base[i - 1][map[x]];
  }

  auto note = [&](std::string const& what) {
    if (sys.detail.empty()) sys.detail = what;
  };
  sys.tables.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i) {
    for (std::size_t j = 0; j <= stages; ++j) {
      auto const [nodes, edges] = sub_build(sys.graphs[i], static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j));
      sys.tables[i].push_back(sub_table(sys.graphs[i], nodes, edges, sys.to_base[i]));
    }
    for (std::size_t j = 0; j < stages; ++j) {
      auto sub = check_subtable(sys.tables[i][j], sys.tables[i][j + 1]);
      if (!sub.ok) {
        sys.nested = false;
        note("level " + std::to_string(i) + " stage " + std::to_string(j) + ": " + sub.reason);
      }
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    // Θ^{i+1}_J lies inside the part of Θ^i_{m_i(J)} present in level i.
    auto const& upper = sys.tables[i + 1][stages];
    auto const [cover, cover_edges] = sub_build(sys.graphs[i], static_cast<std::uint32_t>(stages),
                                                static_cast<std::uint32_t>(sys.m[i][stages]));
    (void)cover_edges;
    std::vector<char> allowed(sys.graphs[0].node_count(), 0);
    for (Node x = 0; x < sys.graphs[i].node_count(); ++x)
      if (cover[x]) allowed[sys.to_base[i][x]] = 1;
    for (Node id : upper.nodes()) {
      if (!allowed[id]) {
        sys.nested = false;
        note("level " + std::to_string(i + 1) + " node " + std::to_string(id) + " falls outside stage m_" +
             std::to_string(i) + "(J) of level " + std::to_string(i));
        break;
      }
    }

    // x ~_a y at level i iff x ~_{φ_i(a)} y at level i + 1, in level-0 ids.
    std::vector<Node> back(sys.graphs[0].node_count(), static_cast<Node>(-1));
    for (Node x = 0; x < sys.graphs[i].node_count(); ++x) back[sys.to_base[i][x]] = x;
    LatticeTable const lower = table_of(sys.graphs[i], sys.graphs[i].stages().size() - 1);
    FiniteLattice const& Li = sys.lattices[i];
    std::size_t const sz = upper.size();
    for (Elem a = 0; a < Li.size(); ++a) {
      std::vector<std::uint32_t> labels(sz);
      for (std::size_t p = 0; p < sz; ++p) labels[p] = lower.rel(a).rep(back[upper.nodes()[p]]);
      EqRel const lhs = EqRel::from_labels(labels);
      EqRel const& rhs = upper.rel(homs[i](a));
      sys.pairs_checked += sz * sz;
      if (auto d = disagreement(lhs, rhs)) {
        sys.identity_sweep = false;
        note("identity sweep fails between levels " + std::to_string(i) + " and " + std::to_string(i + 1) + " at (" +
             std::to_string(upper.nodes()[d->first]) + ", " + std::to_string(upper.nodes()[d->second]) + "), " +
             Li.name(a));
      }
    }
  }
  return sys;
}

nlohmann::json assembly_to_json(SystemAssembly const& sys) {
  using nlohmann::json;
  json j;
  auto lattices = json::array();
  for (auto const& L : sys.lattices) lattices.push_back(L.names());
  j["lattices"] = std::move(lattices);
  auto homs = json::array();
  for (auto const& phi : sys.homs) homs.push_back(hom_json(phi)["map"]);
  j["homs"] = std::move(homs);
  j["stages"] = sys.stages;
  j["h"] = sys.h;
  j["m"] = sys.m;
  j["composite"] = sys.composite;
  auto levels = json::array();
  for (std::size_t i = 0; i < sys.graphs.size(); ++i) {
    auto sizes = json::array();
    for (auto const& t : sys.tables[i]) sizes.push_back(t.size());
    levels.push_back({{"nodes", sys.graphs[i].node_count()},
                      {"edges", sys.graphs[i].edge_count()},
                      {"stages", steps_json(sys.graphs[i])},
                      {"table_sizes", std::move(sizes)},
                      {"to_base", sys.to_base[i]}});
  }
  j["levels"] = std::move(levels);
  j["nested"] = sys.nested;
  j["identity_sweep"] = sys.identity_sweep;
  j["pairs_checked"] = sys.pairs_checked;
  j["detail"] = sys.detail;
  return j;
}

}  // namespace lattab
