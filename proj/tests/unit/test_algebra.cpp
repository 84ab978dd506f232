#include <doctest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "lattab/algebra.hpp"
#include "lattab/error.hpp"
#include "oracles.hpp"

using namespace lattab;

namespace {

LatticeTable fixture(std::string const& name) {
  std::ifstream in(std::string(LATTAB_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  return table_from_json(nlohmann::json::parse(in));
}

Transformation random_map(std::mt19937_64& rng, std::size_t n) {
  Transformation f(n);
  for (auto& v : f) v = static_cast<Node>(rng() % n);
  return f;
}

}  // namespace

TEST_CASE("transformations") {
  Transformation const f = {1, 2, 0}, g = {0, 0, 2};
  CHECK(compose(f, g) == Transformation{0, 2, 0});
  CHECK(compose(identity_map(3), f) == f);
  CHECK(constant_map(3, 2) == Transformation{2, 2, 2});
}

TEST_CASE("composition closure agrees with brute force") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t const n = 2 + rng() % 4;
    std::vector<Transformation> gens = {random_map(rng, n), random_map(rng, n)};
    auto const A = close_composition(n, gens);
    auto const expected = oracle::closure(n, gens);
    CHECK(std::vector<Transformation>(expected.begin(), expected.end()) == A.maps);
    CHECK_FALSE(A.identity_adjoined);
  }
  Transformation const rot = {1, 2, 3, 0};
  std::vector<Transformation> one = {rot};
  auto const cyclic = close_composition(4, one);
  CHECK(cyclic.maps.size() == 4);
  CHECK_FALSE(cyclic.identity_adjoined);
  std::vector<Transformation> squash = {{0, 0, 1}};
  auto const with_id = close_composition(3, squash, {.adjoin_identity = true});
  CHECK(with_id.identity_adjoined);
  CHECK(with_id.maps.size() == 3);
  CHECK_THROWS_AS(close_composition(4, one, {.budget = 2}), BudgetExceeded);
}

TEST_CASE("congruence lattices agree with exhaustive search") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t const n = 2 + rng() % 4;
    std::vector<Transformation> gens = {random_map(rng, n)};
    auto const A = close_composition(n, gens, {.adjoin_identity = true});
    auto const con = congruence_lattice(A);
    std::set<Transformation> maps(A.maps.begin(), A.maps.end());
    auto const expected = oracle::congruences(n, maps);
    CHECK(con.congruences.size() == expected.size());
    for (auto const& p : expected) CHECK(std::find(con.congruences.begin(), con.congruences.end(), p) != con.congruences.end());
    for (Elem a = 0; a < con.lattice.size(); ++a)
      for (Elem b = 0; b < con.lattice.size(); ++b)
        CHECK(con.lattice.leq(a, b) == con.congruences[a].subset_of(con.congruences[b]));

    auto const t = dual_congruence_table(A);
    CHECK(t.kind().kind == TableKind::lattice_table);
    CHECK(t.rel(t.labels().bottom()).is_full());
  }
  UnaryAlgebra big{8, {identity_map(8)}, false};
  CHECK_THROWS_AS(congruence_lattice(big), InvalidArgument);
}

TEST_CASE("endomorphism enumeration agrees with brute force") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t const n = 2 + rng() % 4;
    std::vector<Transformation> gens = {random_map(rng, n)};
    auto const t = dual_congruence_table(close_composition(n, gens));
    auto const got = endomorphisms(t, 1000000);
    CHECK(got.complete);
    CHECK(got.maps == oracle::endomorphisms(t));
    for (auto const& f : got.maps) CHECK(is_endomorphism(t, f));
  }
  auto const m3 = fixture("four_point_m3.json");
  auto const all = endomorphisms(m3, 1000000);
  CHECK(all.maps == oracle::endomorphisms(m3));
  auto const cut = endomorphisms(m3, 3);
  CHECK_FALSE(cut.complete);
  CHECK(is_endomorphism(m3, identity_map(4)));
  CHECK_FALSE(is_endomorphism(m3, Transformation{0, 1, 2}));
  CHECK_FALSE(is_endomorphism(m3, Transformation{0, 2, 1, 3}));
}

TEST_CASE("constrained endomorphism search") {
  auto const m3 = fixture("four_point_m3.json");
  std::vector<std::pair<Node, Node>> fixed = {{0, 3}, {3, 0}};
  auto const hit = find_endomorphism(m3, fixed, 1000);
  REQUIRE(hit.status == SearchStatus::found);
  CHECK(hit.map[0] == 3);
  CHECK(hit.map[3] == 0);
  CHECK(is_endomorphism(m3, hit.map));
  // 0 and 1 are a-related; 2 and 3 are not a-related to 0.
  std::vector<std::pair<Node, Node>> impossible = {{0, 0}, {1, 2}, {2, 1}};
  bool exists = false;
  for (auto const& f : oracle::endomorphisms(m3)) exists |= f[0] == 0 && f[1] == 2 && f[2] == 1;
  CHECK((find_endomorphism(m3, impossible, 1000).status == SearchStatus::found) == exists);
}

TEST_CASE("principal congruences stay inside the principal equivalences") {
  for (auto const* name : {"four_point_m3.json", "four_point_chain.json"}) {
    auto const t = fixture(name);
    auto const endos = endomorphisms(t, 1000000);
    CHECK(principal_inclusion_violations(t, endos.maps).empty());
    for (std::size_t x = 0; x < t.size(); ++x)
      for (std::size_t y = 0; y < t.size(); ++y) {
        auto const pc = principal_congruence(t, x, y, endos);
        CHECK(pc.exact);
        CHECK(pc.relation == oracle::generated(t.size(), endos.maps, static_cast<Node>(x), static_cast<Node>(y)));
      }
  }
  // A map outside End moves some pair out of its principal equivalence.
  auto const m3 = fixture("four_point_m3.json");
  std::vector<Transformation> foreign = {{0, 2, 1, 3}};
  CHECK_FALSE(principal_inclusion_violations(m3, foreign).empty());
}

TEST_CASE("Mal'tsev homogeneity on the fixtures") {
  SUBCASE("the M3 four-point table is refuted") {
    auto const t = fixture("four_point_m3.json");
    auto const expected = oracle::maltsev_failure(t);
    REQUIRE(expected.has_value());
    CHECK(*expected == std::array<Node, 4>{0, 3, 0, 1});
    auto const r = check_maltsev(t);
    CHECK(r.verdict == Verdict::refuted);
    CHECK(r.complete_enumeration);
    REQUIRE(r.witness.has_value());
    auto const [x, y, u, v] = *r.witness;
    auto const ends = oracle::endomorphisms(t);
    CHECK(oracle::principal_equivalence(t, static_cast<Node>(x), static_cast<Node>(y)).related(u, v));
    CHECK_FALSE(oracle::generated(t.size(), ends, static_cast<Node>(x), static_cast<Node>(y)).related(u, v));
  }
  SUBCASE("the four-point chain table is verified") {
    auto const t = fixture("four_point_chain.json");
    CHECK_FALSE(oracle::maltsev_failure(t).has_value());
    auto const r = check_maltsev(t);
    CHECK(r.verdict == Verdict::verified);
    CHECK(r.certified == r.premise_quadruples);
    for (auto const& cert : r.certificates) {
      std::string why;
      CHECK_MESSAGE(recheck_certificate(t, cert, &why), why);
    }
  }
}

TEST_CASE("Mal'tsev verdicts agree with brute force on random Con tables") {
  std::mt19937_64 rng(31);
  std::size_t refuted = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t const n = 2 + rng() % 4;
    std::vector<Transformation> gens = {random_map(rng, n), random_map(rng, n)};
    auto const t = dual_congruence_table(close_composition(n, gens, {.adjoin_identity = true}));
    auto const r = check_maltsev(t);
    auto const expected = oracle::maltsev_failure(t);
    CHECK((r.verdict == Verdict::refuted) == expected.has_value());
    CHECK(r.verdict != Verdict::unknown);
    refuted += expected.has_value();
  }
  // Con tables of unary algebras are homogeneous.
  CHECK(refuted == 0);
}

TEST_CASE("a tight search budget yields unknown, never a false verdict") {
  auto const t = fixture("four_point_chain.json");
  auto const r = check_maltsev(t, {.enumeration_budget = 1, .search_budget = 1});
  CHECK(r.verdict != Verdict::refuted);
  CHECK_FALSE(r.complete_enumeration);
}

TEST_CASE("homogeneity interpolants and certificates") {
  auto const t = fixture("four_point_chain.json");
  // x = 0, y = 1 are m-related; so are u = 2, v = 3.
  auto const s = find_homogeneity_interpolants(t, 0, 1, 2, 3, 1000);
  REQUIRE(s.status == SearchStatus::found);
  auto const& cert = s.certificate;
  CHECK(cert.chain.front() == 2);
  CHECK(cert.chain.back() == 3);
  CHECK(cert.maps.size() + 1 == cert.chain.size());
  CHECK(recheck_certificate(t, cert));

  auto const via_list = find_homogeneity_interpolants(t, 0, 1, 2, 3, endomorphisms(t, 100000).maps);
  CHECK(via_list.status == SearchStatus::found);
  CHECK_THROWS_AS(find_homogeneity_interpolants(t, 0, 1, 0, 2, 1000), InvalidArgument);

  auto const j = certificate_to_json(cert, t);
  auto const back = certificate_from_json(j, t);
  CHECK(back.chain == cert.chain);
  CHECK(back.maps == cert.maps);

  auto broken = cert;
  broken.maps.front() = Transformation{0, 2, 1, 3};
  std::string why;
  CHECK_FALSE(recheck_certificate(t, broken, &why));
  CHECK_FALSE(why.empty());
  auto short_chain = cert;
  short_chain.chain.back() = 1;
  CHECK_FALSE(recheck_certificate(t, short_chain));
}

TEST_CASE("homogeneity sweep over a sub-table premise") {
  auto const t = fixture("four_point_chain.json");
  std::vector<Node> ids = {0, 1, 2};
  auto const small = restrict_table(t, ids).table;
  auto const sweep = homogeneity_sweep(t, small, 1000, 2);
  CHECK(sweep.verdict == Verdict::verified);
  CHECK(sweep.certified == sweep.premise_quadruples);
  CHECK(sweep.certificates.size() <= 2);

  auto const m3 = fixture("four_point_m3.json");
  CHECK(homogeneity_sweep(m3, m3, 1000).verdict == Verdict::refuted);
}
