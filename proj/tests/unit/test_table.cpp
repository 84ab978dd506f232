#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "lattab/error.hpp"
#include "lattab/table.hpp"
#include "oracles.hpp"

using namespace lattab;

namespace {

LatticeTable fixture(std::string const& name) {
  std::ifstream in(std::string(LATTAB_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  return table_from_json(nlohmann::json::parse(in));
}

EqRel labels(std::vector<std::uint32_t> v) { return EqRel::from_labels(v); }

// B2-labelled table on four points; rel(a), rel(b) as given.
LatticeTable b2_table(EqRel a, EqRel b) {
  auto const B2 = catalog_lattice("B2");
  return LatticeTable(B2, {EqRel::full(4), std::move(a), std::move(b), EqRel::discrete(4)});
}

}  // namespace

TEST_CASE("constructor invariants") {
  auto const C3 = catalog_lattice("3-chain");
  auto const mid = labels({0, 0, 1, 1});
  CHECK_NOTHROW(LatticeTable(C3, {EqRel::full(4), mid, EqRel::discrete(4)}));
  CHECK_THROWS_AS(LatticeTable(C3, {mid, mid, EqRel::discrete(4)}), InvalidArgument);
  CHECK_THROWS_AS(LatticeTable(C3, {EqRel::full(4), mid, mid}), InvalidArgument);
  CHECK_THROWS_AS(LatticeTable(C3, {EqRel::full(4), EqRel::discrete(4)}), InvalidArgument);
  // a < b needs rel(a) to contain rel(b); reversed here.
  auto const C4 = catalog_lattice("4-chain");
  CHECK_THROWS_AS(LatticeTable(C4, {EqRel::full(4), labels({0, 0, 1, 2}), labels({0, 0, 0, 1}),
                                    EqRel::discrete(4)}),
                  InvalidArgument);
  CHECK_THROWS_AS(LatticeTable(C3, {5, 3, 4}, {EqRel::full(3), EqRel::full(3), EqRel::discrete(3)}),
                  InvalidArgument);
}

TEST_CASE("ids and positions") {
  auto const C3 = catalog_lattice("3-chain");
  LatticeTable t(C3, {2, 5, 9}, {EqRel::full(3), labels({0, 0, 1}), EqRel::discrete(3)});
  CHECK(t.position(5) == 1);
  CHECK_FALSE(t.index_of(4).has_value());
  CHECK_THROWS_AS(t.position(4), InvalidArgument);
  CHECK(t.related(C3.at("m"), 0, 1));
}

TEST_CASE("table kinds") {
  SUBCASE("lattice table") {
    auto const t = b2_table(labels({0, 0, 1, 1}), labels({0, 1, 1, 2}));
    CHECK(t.kind().kind == TableKind::lattice_table);
    CHECK(t.labeling_injective());
  }
  SUBCASE("joins leave the family") {
    auto const t = b2_table(labels({0, 0, 1, 2}), labels({0, 1, 2, 2}));
    auto const k = t.kind();
    CHECK(k.kind == TableKind::usl_table);
    CHECK(k.broken == "join");
  }
  SUBCASE("meets leave the family") {
    auto const t = b2_table(labels({0, 0, 0, 1}), labels({0, 1, 1, 1}));
    auto const k = t.kind();
    CHECK(k.kind == TableKind::invalid);
    CHECK(k.broken == "meet");
  }
  SUBCASE("non-injective labels") {
    auto const t = b2_table(labels({0, 0, 1, 1}), labels({0, 0, 1, 1}));
    CHECK_FALSE(t.labeling_injective());
    CHECK(t.distinct_relations().size() == 3);
  }
}

TEST_CASE("restriction and sub-tables") {
  auto const t = fixture("four_point_m3.json");
  CHECK(t.kind().kind == TableKind::lattice_table);
  std::vector<Node> ids = {0, 1, 3};
  auto const r = restrict_table(t, ids);
  CHECK(r.table.size() == 3);
  CHECK(check_subtable(r.table, t).ok);

  std::vector<Node> empty;
  CHECK_THROWS_AS(restrict_table(t, empty), InvalidArgument);
  std::vector<Node> foreign = {0, 8};
  CHECK_THROWS_AS(restrict_table(t, foreign), InvalidArgument);

  auto rel = r.table.relations();
  Elem const a = t.labels().at("a");
  rel[a] = EqRel::discrete(3);
  LatticeTable const tampered(t.labels(), r.table.nodes(), rel);
  auto const rep = check_subtable(tampered, t);
  CHECK_FALSE(rep.ok);
  CHECK(rep.label == a);
  CHECK(std::min(rep.x, rep.y) == 0);
  CHECK(std::max(rep.x, rep.y) == 1);

  LatticeTable const other(t.labels(), {0, 1, 7}, r.table.relations());
  CHECK_FALSE(check_subtable(other, t).ok);
  CHECK_THROWS_AS(check_subtable(fixture("four_point_chain.json"), t), InvalidArgument);
}

TEST_CASE("principal equivalence agrees with brute force") {
  for (auto const* name : {"four_point_m3.json", "four_point_chain.json"}) {
    auto const t = fixture(name);
    for (std::size_t x = 0; x < t.size(); ++x)
      for (std::size_t y = 0; y < t.size(); ++y)
        CHECK(principal_equivalence(t, x, y) == oracle::principal_equivalence(t, static_cast<Node>(x),
                                                                              static_cast<Node>(y)));
  }
}

TEST_CASE("meet interpolants") {
  // rel(a) = 01|23|45, rel(b) = 0|12|34|5: 0 reaches 5 only by alternating.
  auto const B2 = catalog_lattice("B2");
  auto const ra = labels({0, 0, 1, 1, 2, 2}), rb = labels({0, 1, 1, 2, 2, 3});
  LatticeTable const t(B2, {EqRel::full(6), ra, rb, EqRel::discrete(6)});
  Elem const a = B2.at("a"), b = B2.at("b");
  auto const path = search_alternating_chain(t, a, b, 0, 5, 1000);
  CHECK(path.status == SearchStatus::found);
  // The last step b-relates 5 to itself.
  CHECK(path.chain == std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(search_alternating_chain(t, b, a, 0, 5, 1000).chain == std::vector<std::size_t>{0, 1, 2, 3, 4});
  auto const self = find_meet_interpolants(t, a, b, 3, 3, 1000);
  CHECK(self.status == SearchStatus::found);
  CHECK(search_alternating_chain(t, a, b, 0, 5, 1).status == SearchStatus::budget_exhausted);

  auto const C3 = catalog_lattice("3-chain");
  Elem const m = C3.at("m");
  LatticeTable const chain(C3, {EqRel::full(4), labels({0, 0, 1, 1}), EqRel::discrete(4)});
  CHECK_THROWS_AS(find_meet_interpolants(chain, m, m, 0, 3, 1000), InvalidArgument);
  CHECK(find_meet_interpolants(chain, m, m, 0, 1, 1000).status == SearchStatus::found);

  auto const split = b2_table(labels({0, 0, 1, 1}), labels({0, 0, 1, 1}));
  CHECK(search_alternating_chain(split, a, b, 0, 3, 1000).status == SearchStatus::not_found);
}

TEST_CASE("JSON round trip keeps ids and labels") {
  auto const C3 = catalog_lattice("3-chain");
  LatticeTable const t(C3, {2, 5, 9, 11}, {EqRel::full(4), labels({0, 1, 0, 1}), EqRel::discrete(4)});
  CHECK(table_from_json(table_to_json(t)) == t);
  auto const m3 = fixture("four_point_m3.json");
  CHECK(m3.labels().size() == 5);
  CHECK(table_from_json(table_to_json(m3)) == m3);

  auto j = table_to_json(t);
  j["nodes"] = nlohmann::json::array({2, 2, 9, 11});
  CHECK_THROWS_AS(table_from_json(j), InvalidArgument);
  CHECK_THROWS_AS(table_from_json(nlohmann::json::object()), InvalidArgument);
}

TEST_CASE("enum names") {
  CHECK(std::string(to_string(Verdict::unknown)) == "unknown");
  CHECK(std::string(to_string(TableKind::usl_table)) == "usl-table");
  CHECK(std::string(to_string(SearchStatus::budget_exhausted)) == "budget-exhausted");
}
