#include <doctest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "lattab/error.hpp"
#include "lattab/morphism.hpp"
#include "oracles.hpp"

using namespace lattab;

namespace {

UslHom canon(char const* s, char const* t) { return *canonical_hom(catalog_lattice(s), catalog_lattice(t)); }

}  // namespace

TEST_CASE("recoloring through the adjoint") {
  auto const phi = canon("3-chain", "B2");
  auto const g = build_homogenized(phi.target(), 1);
  auto const adj = galois_adjoint(phi);
  auto const plain = recolor(g, phi, 1);
  CHECK(plain.lattice == phi.source());
  CHECK(plain.nodes == g.stage(1).nodes);
  REQUIRE(plain.edges.size() == g.stage(1).edges);
  for (std::size_t e = 0; e < plain.edges.size(); ++e) CHECK(plain.edges[e].color == adj[g.edges()[e].color]);
  CHECK_THROWS_AS(recolor(build_homogenized(phi.source(), 1), phi, 1), InvalidArgument);

  auto const id = UslHom::identity(g.lattice());
  CHECK(table_of(recolor(g, id, 1)) == table_of(g, 1));
}

TEST_CASE("embeddings of homogenized stages verify and match the formula") {
  for (auto const& s : catalog_names())
    for (auto const& t : catalog_names()) {
      auto const phi = canonical_hom(catalog_lattice(s), catalog_lattice(t));
      if (!phi) continue;
      std::size_t const top = (s == "2" || s == "3-chain") ? 2 : 1;
      for (std::size_t n = 0; n <= top; ++n) {
        CAPTURE(s);
        CAPTURE(t);
        CAPTURE(n);
        auto const emb = embed_homogenized(*phi, n);
        auto const r = verify_embedding(emb);
        CHECK_MESSAGE(r.ok(), r.detail);
        CHECK(emb.required_stage(n) == required_stage_formula(*phi, n));
        std::set<Node> image(emb.node_map.begin(), emb.node_map.end());
        CHECK(image.size() == emb.node_map.size());
      }
    }
}

TEST_CASE("frozen m(n)") {
  auto m = [](UslHom const& phi) {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n <= 2; ++n) out.push_back(required_stage_formula(phi, n));
    return out;
  };
  using V = std::vector<std::size_t>;
  CHECK(m(canon("2", "3-chain")) == V{0, 3, 8});
  CHECK(m(canon("2", "B2")) == V{0, 7, 16});
  CHECK(m(canon("3-chain", "N5")) == V{0, 4, 8});
  CHECK(m(canon("3-chain", "B2")) == V{0, 3, 8});

  auto const e = embed_homogenized(canon("3-chain", "N5"), 1);
  CHECK(e.source.stage(1).nodes == 35);
  CHECK(e.target.stage(1).nodes == 38);
  CHECK(e.target.stage(1).copies == 4);
}

TEST_CASE("a non-injective homomorphism is rejected") {
  auto const C3 = catalog_lattice("3-chain"), two = catalog_lattice("2");
  UslHom const squash(C3, two, {0, 0, 1});
  CHECK_THROWS_AS(embed_homogenized(squash, 1), InvalidArgument);
  CHECK_THROWS_AS(required_stage_formula(squash, 1), InvalidArgument);
}

TEST_CASE("tampered embeddings are caught") {
  auto const emb = embed_homogenized(canon("3-chain", "N5"), 1);
  REQUIRE(verify_embedding(emb).ok());

  SUBCASE("collapsed node map") {
    auto bad = emb;
    bad.node_map[2] = bad.node_map[3];
    auto const r = verify_embedding(bad);
    CHECK_FALSE(r.injective);
    CHECK_FALSE(r.ok());
  }
  SUBCASE("swapped nodes") {
    auto bad = emb;
    std::swap(bad.node_map[0], bad.node_map[2]);
    auto const r = verify_embedding(bad);
    CHECK_FALSE(r.ok());
    CHECK((r.witness_edge.has_value() || r.witness_label.has_value()));
  }
  SUBCASE("rerouted edge") {
    auto bad = emb;
    bad.edge_map[1] = bad.edge_map[0];
    auto const r = verify_embedding(bad);
    CHECK_FALSE(r.colors);
    REQUIRE(r.witness_edge.has_value());
    CHECK(*r.witness_edge == 1);
  }
}

TEST_CASE("label transport agrees with brute force") {
  auto const emb = embed_homogenized(canon("2", "3-chain"), 1);
  auto const& L0 = emb.phi.source();
  std::size_t const ns = emb.source.stage(1).nodes;
  for (Elem alpha = 0; alpha < L0.size(); ++alpha) {
    auto const src = oracle::connectivity(emb.source, emb.phi(alpha), 1);
    auto const dst = oracle::connectivity(emb.target, alpha, emb.target.stages().size() - 1);
    for (Node x = 0; x < ns; ++x)
      for (Node y = 0; y < ns; ++y) CHECK(src.related(x, y) == dst.related(emb.node_map[x], emb.node_map[y]));
  }
}

TEST_CASE("embedding JSON round trip") {
  auto const emb = embed_homogenized(canon("2", "B2"), 1);
  auto const back = embedding_from_json(embedding_to_json(emb));
  CHECK(back.node_map == emb.node_map);
  CHECK(back.edge_map == emb.edge_map);
  CHECK(back.allocation == emb.allocation);
  CHECK(back.target == emb.target);
  CHECK(verify_embedding(back).ok());

  auto j = embedding_to_json(emb);
  auto const a = j["node_map"][0];
  j["node_map"][0] = j["node_map"][1];
  j["node_map"][1] = a;
  CHECK_FALSE(verify_embedding(embedding_from_json(j)).ok());
}

TEST_CASE("padded index") {
  std::vector<std::size_t> const marks = {0, 3, 8};
  CHECK(padded_index(marks, 0) == 0);
  CHECK(padded_index(marks, 2) == 0);
  CHECK(padded_index(marks, 3) == 1);
  CHECK(padded_index(marks, 7) == 1);
  CHECK(padded_index(marks, 8) == 2);
  CHECK(padded_index(marks, 100) == 2);
  CHECK_THROWS_AS(padded_index({2, 5}, 1), InvalidArgument);
  CHECK_THROWS_AS(padded_index({0, 3, 3}, 4), InvalidArgument);
  CHECK_THROWS_AS(padded_index({}, 0), InvalidArgument);
}

TEST_CASE("assembly of 2 -> 3-chain -> B2") {
  auto const f = canon("2", "3-chain"), g = canon("3-chain", "B2");
  auto const sys = assemble_system({f, g}, 1);
  CHECK_MESSAGE(sys.ok(), sys.detail);
  CHECK(sys.h == std::vector<std::size_t>{0, 0, 0});
  CHECK(sys.m == std::vector<std::vector<std::size_t>>{{0, 3}, {0, 3}});
  REQUIRE(sys.graphs.size() == 3);
  CHECK(sys.graphs[0].stages().back().nodes == 29);
  CHECK(sys.graphs[1].stages().back().nodes == 29);
  CHECK(sys.graphs[2].stages().back().nodes == 23);
  CHECK(sys.pairs_checked > 0);

  // Every level sits inside level 0 as a sub-table with its own labels.
  for (std::size_t i = 0; i < 3; ++i) {
    auto const& t = sys.table(i, sys.composite[i].back());
    CHECK(t.labels() == sys.lattices[i]);
    std::set<Node> ids(t.nodes().begin(), t.nodes().end());
    for (Node id : ids) CHECK(id < sys.graphs[0].node_count());
  }
  for (std::size_t i = 0; i + 1 < 3; ++i) {
    std::set<Node> const lower(sys.to_base[i].begin(), sys.to_base[i].end());
    for (Node id : sys.to_base[i + 1]) CHECK(lower.count(id) == 1);
  }

  auto const j = assembly_to_json(sys);
  CHECK(j.at("identity_sweep").get<bool>());
  CHECK(j.at("levels").size() == 3);

  CHECK_THROWS_AS(assemble_system({g, f}, 1), InvalidArgument);
  CHECK_THROWS_AS(assemble_system({f, g}, 2, 1000), BudgetExceeded);
}
