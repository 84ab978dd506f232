#include <algorithm>
#include <string>

#include "lattab/algebra.hpp"
#include "lattab/error.hpp"
#include "lattab/table.hpp"

namespace lattab {

bool SequentialReport::all_verified() const noexcept {
  for (auto const* c : {&usl_stages, &lattice_union, &meet_interpolants, &homogeneity, &coherent})
    if (c->verdict != Verdict::verified) return false;
  return true;
}

namespace {

std::vector<LatticeTable const*> effective(TableChain const& chain) {
  std::vector<LatticeTable const*> out;
  if (chain.markers.empty()) {
    for (auto const& t : chain.tables) out.push_back(&t);
  } else {
    for (std::size_t i : chain.markers) {
      if (i >= chain.tables.size()) throw InvalidArgument("marker outside the chain");
      out.push_back(&chain.tables[i]);
    }
  }
  return out;
}

std::vector<Node> positions_in(LatticeTable const& small, LatticeTable const& big) {
  std::vector<Node> pos;
  pos.reserve(small.size());
  for (Node id : small.nodes()) pos.push_back(static_cast<Node>(big.position(id)));
  return pos;
}

void demote(ClauseResult& c, Verdict v, std::string detail) {
  auto rank = [](Verdict x) { return x == Verdict::refuted ? 2 : x == Verdict::unknown ? 1 : 0; };
  if (rank(v) > rank(c.verdict)) {
    c.verdict = v;
    c.detail = std::move(detail);
  }
}

/// Meet interpolants for every pair of `small` inside `big`: the Part-join
/// of rel(a) and rel(b) taken in `big` must contain rel(a ^ b) of `small`.
ClauseResult meet_clause(LatticeTable const& small, LatticeTable const& big, std::size_t budget) {
  ClauseResult out;
  FiniteLattice const& L = small.labels();
  std::vector<Node> const pos = positions_in(small, big);
  for (Elem a = 0; a < L.size(); ++a) {
    for (Elem b = a + 1; b < L.size(); ++b) {
      if (L.leq(a, b) || L.leq(b, a)) continue;  // z1 = y already interpolates
      EqRel const joined = part_join(big.rel(a), big.rel(b)).restrict(pos);
      EqRel const& lower = small.rel(L.meet(a, b));
      if (lower.subset_of(joined)) continue;
      for (Node x = 0; x < small.size(); ++x) {
        Node const y = lower.rep(x);
        if (joined.related(x, y)) continue;
        auto r = search_alternating_chain(big, a, b, pos[x], pos[y], budget);
        Verdict v = r.status == SearchStatus::budget_exhausted ? Verdict::unknown : Verdict::refuted;
        return {v, "no " + L.name(a) + "/" + L.name(b) + " interpolants for (" +
                       std::to_string(small.nodes()[x]) + ", " + std::to_string(small.nodes()[y]) + ")"};
      }
    }
  }
  return out;
}

ClauseResult homogeneity_clause(LatticeTable const& small, LatticeTable const& big, std::size_t budget) {
  auto sweep = homogeneity_sweep(big, small, budget);
  ClauseResult out{sweep.verdict, {}};
  if (sweep.witness) {
    auto const& w = *sweep.witness;
    out.detail = "quadruple (" + std::to_string(big.nodes()[w[0]]) + ", " + std::to_string(big.nodes()[w[1]]) +
                 ", " + std::to_string(big.nodes()[w[2]]) + ", " + std::to_string(big.nodes()[w[3]]) + ")" +
                 (sweep.verdict == Verdict::unknown ? " undecided within budget" : " has no interpolants");
  }
  return out;
}

}  // namespace

SequentialReport check_sequential(TableChain const& chain, std::size_t budget) {
  SequentialReport report;
  auto const stages = effective(chain);
  if (stages.empty()) return report;
  for (auto const* t : stages)
    if (!(t->labels() == stages.front()->labels())) throw InvalidArgument("stages use different label lattices");

  for (std::size_t n = 0; n < stages.size(); ++n) {
    auto const kind = stages[n]->kind();
    if (kind.kind == TableKind::invalid) {
      demote(report.usl_stages, Verdict::refuted,
             "stage " + std::to_string(n) + " is not closed under intersection");
    }
  }

  LatticeTable const& last = *stages.back();
  auto const last_kind = last.kind();
  if (last_kind.kind == TableKind::invalid) {
    report.lattice_union = {Verdict::refuted, "the last stage is not even an usl table"};
  } else if (last_kind.kind == TableKind::usl_table) {
    report.lattice_union = {Verdict::unknown,
                            "the last stage is not join-closed; a finite prefix cannot settle the union"};
  }

  bool coherent = true;
  for (std::size_t n = 0; n + 1 < stages.size(); ++n) {
    auto sub = check_subtable(*stages[n], *stages[n + 1]);
    if (!sub.ok) {
      coherent = false;
      demote(report.coherent, Verdict::refuted, "stage " + std::to_string(n) + ": " + sub.reason);
    }
  }

  for (std::size_t n = 0; n + 1 < stages.size(); ++n) {
    if (!coherent) {
      demote(report.meet_interpolants, Verdict::unknown, "stages are not coherent");
      demote(report.homogeneity, Verdict::unknown, "stages are not coherent");
      break;
    }
    auto m = meet_clause(*stages[n], *stages[n + 1], budget);
    if (m.verdict != Verdict::verified) demote(report.meet_interpolants, m.verdict, "stage " + std::to_string(n) + ": " + m.detail);
    auto h = homogeneity_clause(*stages[n], *stages[n + 1], budget);
    if (h.verdict != Verdict::verified) demote(report.homogeneity, h.verdict, "stage " + std::to_string(n) + ": " + h.detail);
  }
  return report;
}

std::vector<std::size_t> sequentialize(TableChain const& chain, std::size_t budget) {
  if (budget == 0) throw InvalidArgument("sequentialize needs a positive budget");
  auto const stages = effective(chain);
  std::vector<std::size_t> indices;
  if (stages.empty()) return indices;
  std::size_t cur = 0;
  indices.push_back(0);
  while (cur + 1 < stages.size()) {
    std::optional<std::size_t> next;
    for (std::size_t m = cur + 1; m < stages.size(); ++m) {
      if (!check_subtable(*stages[cur], *stages[m]).ok) continue;
      if (meet_clause(*stages[cur], *stages[m], budget).verdict != Verdict::verified) continue;
      if (homogeneity_clause(*stages[cur], *stages[m], budget).verdict != Verdict::verified) continue;
      next = m;
      break;
    }
    if (!next) {
      throw BudgetExceeded("stage " + std::to_string(cur) + " has no closing stage within the chain", budget);
    }
    indices.push_back(*next);
    cur = *next;
  }
  return indices;
}

}  // namespace lattab
