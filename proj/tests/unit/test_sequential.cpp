#include <doctest.h>

#include "lattab/error.hpp"
#include "lattab/pudlak.hpp"
#include "lattab/table.hpp"

using namespace lattab;

namespace {

TableChain stages_of(char const* name, std::size_t stages) {
  auto const g = build_homogenized(catalog_lattice(name), stages);
  TableChain chain;
  for (std::size_t s = 0; s <= stages; ++s) chain.tables.push_back(table_of(g, s));
  return chain;
}

EqRel labels(std::vector<std::uint32_t> v) { return EqRel::from_labels(v); }

}  // namespace

TEST_CASE("homogenized stages of small chains are sequential") {
  for (auto const* name : {"2", "3-chain"}) {
    CAPTURE(name);
    auto const chain = stages_of(name, 2);
    auto const r = check_sequential(chain, 20000);
    CHECK_MESSAGE(r.usl_stages.verdict == Verdict::verified, r.usl_stages.detail);
    CHECK_MESSAGE(r.lattice_union.verdict == Verdict::verified, r.lattice_union.detail);
    CHECK_MESSAGE(r.meet_interpolants.verdict == Verdict::verified, r.meet_interpolants.detail);
    CHECK_MESSAGE(r.homogeneity.verdict == Verdict::verified, r.homogeneity.detail);
    CHECK_MESSAGE(r.coherent.verdict == Verdict::verified, r.coherent.detail);
    CHECK(r.all_verified());
    CHECK(sequentialize(chain, 20000) == std::vector<std::size_t>{0, 1, 2});
  }
}

TEST_CASE("markers select a subsequence") {
  auto chain = stages_of("2", 2);
  chain.markers = {0, 2};
  CHECK(check_sequential(chain, 20000).all_verified());
  CHECK(sequentialize(chain, 20000) == std::vector<std::size_t>{0, 1});
  chain.markers = {0, 5};
  CHECK_THROWS_AS(check_sequential(chain, 20000), InvalidArgument);
}

TEST_CASE("a chain that is not coherent") {
  auto const C3 = catalog_lattice("3-chain");
  TableChain chain;
  // 0 ~m 1 at stage 0 but not at stage 1.
  chain.tables.emplace_back(C3, std::vector<Node>{0, 1}, std::vector<EqRel>{EqRel::full(2), EqRel::full(2), EqRel::discrete(2)});
  chain.tables.emplace_back(C3, std::vector<Node>{0, 1, 2},
                            std::vector<EqRel>{EqRel::full(3), labels({0, 1, 1}), EqRel::discrete(3)});
  auto const r = check_sequential(chain, 1000);
  CHECK(r.coherent.verdict == Verdict::refuted);
  CHECK_FALSE(r.coherent.detail.empty());
  CHECK(r.homogeneity.verdict == Verdict::unknown);
  CHECK_FALSE(r.all_verified());
  CHECK_THROWS_AS(sequentialize(chain, 1000), BudgetExceeded);
}

TEST_CASE("a last stage that is only an usl table leaves the union open") {
  auto const B2 = catalog_lattice("B2");
  TableChain chain;
  chain.tables.emplace_back(B2, std::vector<EqRel>{EqRel::full(4), labels({0, 0, 1, 2}), labels({0, 1, 2, 2}),
                                                   EqRel::discrete(4)});
  auto const r = check_sequential(chain, 1000);
  CHECK(r.usl_stages.verdict == Verdict::verified);
  CHECK(r.lattice_union.verdict == Verdict::unknown);

  chain.tables.front() = LatticeTable(B2, {EqRel::full(4), labels({0, 0, 0, 1}), labels({0, 1, 1, 1}), EqRel::discrete(4)});
  auto const bad = check_sequential(chain, 1000);
  CHECK(bad.usl_stages.verdict == Verdict::refuted);
  CHECK(bad.lattice_union.verdict == Verdict::refuted);
}

TEST_CASE("argument checks") {
  auto chain = stages_of("2", 1);
  CHECK_THROWS_AS(sequentialize(chain, 0), InvalidArgument);
  chain.tables.push_back(table_of(build_homogenized(catalog_lattice("3-chain"), 0), 0));
  CHECK_THROWS_AS(check_sequential(chain, 1000), InvalidArgument);
  CHECK(check_sequential(TableChain{}, 1000).all_verified());
  CHECK(sequentialize(TableChain{}, 1000).empty());
}
