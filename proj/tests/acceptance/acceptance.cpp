// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lattab/algebra.hpp"
#include "lattab/coding.hpp"
#include "lattab/lattice.hpp"
#include "lattab/morphism.hpp"
#include "lattab/partition.hpp"
#include "lattab/pudlak.hpp"
#include "lattab/table.hpp"
#include "oracles.hpp"

#ifndef LATTAB_CLI_PATH
#error "LATTAB_CLI_PATH must name the lattab executable"
#endif

namespace fs = std::filesystem;
using namespace lattab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(std::string const& why) {
    if (pass) detail = why;
    pass = false;
  }
};

/// Tables produced by criteria 4 and 5, swept again by criterion 6.
std::vector<LatticeTable> built_tables;

// 1 ---------------------------------------------------------------------

Outcome partition_laws() {
  Outcome out;
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 1000 && out.pass; ++i) {
    std::size_t const n = 1 + rng() % 7;
    EqRel const p = oracle::random_partition(rng, n);
    EqRel const q = oracle::random_partition(rng, n);
    EqRel const r = oracle::random_partition(rng, n);
    EqRel const j = part_join(p, q);
    EqRel const m = part_meet(p, q);
    if (j != oracle::join(p, q)) out.fail("join differs from the closure oracle");
    if (m != oracle::meet(p, q)) out.fail("meet differs from the intersection oracle");
    if (j != part_join(q, p) || m != part_meet(q, p)) out.fail("not commutative");
    if (part_join(p, p) != p || part_meet(p, p) != p) out.fail("not idempotent");
    if (part_join(p, m) != p || part_meet(p, j) != p) out.fail("absorption fails");
    if (part_join(j, r) != part_join(p, part_join(q, r))) out.fail("join not associative");
    if (part_meet(m, r) != part_meet(p, part_meet(q, r))) out.fail("meet not associative");
    if (part_join(p, EqRel::discrete(n)) != p || part_meet(p, EqRel::full(n)) != p) out.fail("bounds fail");
    bool const pq = oracle::subset(p, q), qp = oracle::subset(q, p);
    Order const expected = pq && qp ? Order::equal : pq ? Order::finer : qp ? Order::coarser : Order::incomparable;
    if (compare(p, q) != expected) out.fail("compare disagrees with inclusion");
    if ((compare(p, q) == Order::finer || compare(p, q) == Order::equal) != (j == q)) out.fail("compare vs join");
  }
  if (out.pass) out.detail = "1000 random pairs, carriers up to 7";
  return out;
}

// 2 ---------------------------------------------------------------------

Outcome adjoint_suite() {
  Outcome out;
  std::size_t homs = 0;
  for (auto const& a : catalog_names())
    for (auto const& b : catalog_names()) {
      FiniteLattice const s = catalog_lattice(a), t = catalog_lattice(b);
      auto const all = enumerate_usl_homs(s, t);
      auto const brute = oracle::usl_homs(s, t);
      if (all.size() != brute.size()) {
        out.fail(a + " -> " + b + ": hom count differs from the oracle");
        continue;
      }
      for (std::size_t i = 0; i < all.size(); ++i) {
        ++homs;
        if (all[i].map() != brute[i]) out.fail(a + " -> " + b + ": hom enumeration order differs");
        auto const adj = galois_adjoint(all[i]);
        if (adj != oracle::adjoint(s, t, brute[i])) out.fail(a + " -> " + b + ": adjoint differs from the oracle");
        auto const rep = check_adjoint_clauses(all[i], adj);
        if (!rep.ok()) out.fail(a + " -> " + b + ": " + rep.witness);
      }
    }
  if (out.pass) out.detail = std::to_string(homs) + " homomorphisms over 36 ordered pairs";
  return out;
}

// 3 ---------------------------------------------------------------------

Outcome coherence() {
  Outcome out;
  std::size_t largest = 0;
  for (auto const& name : catalog_names()) {
    ColoredGraph const g = build_homogenized(catalog_lattice(name), 2, 100000);
    largest = std::max(largest, g.node_count());
    for (std::size_t s = 0; s + 1 < g.stages().size(); ++s) {
      LatticeTable const small = table_of(g, s);
      LatticeTable const big = table_of(g, s + 1);
      if (restrict_table(big, small.nodes()).table != small)
        out.fail(name + ": stage " + std::to_string(s) + " is not the restriction of stage " + std::to_string(s + 1));
      auto const sub = check_subtable(small, big);
      if (!sub.ok) out.fail(name + ": " + sub.reason);
    }
  }
  if (out.pass) out.detail = "stages 0..2 of six lattices, largest build " + std::to_string(largest) + " nodes";
  return out;
}

// 4 ---------------------------------------------------------------------

/// Least stage at which the oracle finds a dual isomorphism, with (d)
/// witnessed one stage later.
std::optional<std::size_t> oracle_stage(FiniteLattice const& L, std::size_t max_stage) {
  ColoredGraph g(L);
  for (std::size_t s = 0; s <= max_stage; ++s) {
    g = build_homogenized(L, s + 1, 100000);
    std::vector<EqRel> e;
    for (Elem a = 0; a < L.size(); ++a) e.push_back(oracle::connectivity(g, a, s));
    std::vector<Node> prefix(g.stage(s).nodes);
    for (Node x = 0; x < prefix.size(); ++x) prefix[x] = x;
    bool ok = true;
    for (Elem a = 0; a < L.size() && ok; ++a)
      for (Elem b = 0; b < L.size() && ok; ++b) {
        if (a != b && e[a] == e[b]) ok = false;
        if (L.leq(a, b) != oracle::subset(e[b], e[a])) ok = false;
        if (e[L.join(a, b)] != oracle::meet(e[a], e[b])) ok = false;
        // Join of e(a) and e(b) in the next stage: connectivity through
        // edges colored above a or above b.
        EqRel const joined =
            oracle::connectivity_where(g, s + 1, [&](Elem c) { return L.leq(a, c) || L.leq(b, c); });
        if (e[L.meet(a, b)] != joined.restrict(prefix)) ok = false;
      }
    if (ok) return s;
  }
  return std::nullopt;
}

Outcome representation() {
  Outcome out;
  std::string stages;
  for (std::string const name : {"2", "3-chain", "M3", "N5", "B2"}) {
    FiniteLattice const L = catalog_lattice(name);
    RepresentationOptions opts;
    opts.max_stage = 3;
    opts.node_budget = 100000;
    auto const r = verify_representation(L, opts);
    auto const expected = oracle_stage(L, 3);
    if (!r.stage) {
      out.fail(name + ": no passing stage up to 3" + (r.budget_exhausted ? " within budget" : ""));
      continue;
    }
    if (r.stage != expected) out.fail(name + ": stage differs from the oracle");
    if (name == "2" && *r.stage != 0) out.fail("2 should pass at stage 0");
    if (name == "3-chain" && *r.stage != 1) out.fail("3-chain should pass at stage 1");
    stages += (stages.empty() ? "" : ", ") + name + "@" + std::to_string(*r.stage);
    built_tables.push_back(table_of(build_homogenized(L, *r.stage, 100000), *r.stage));
  }
  if (out.pass) out.detail = "stages " + stages;
  return out;
}

// 5 ---------------------------------------------------------------------

Outcome unary_algebras() {
  Outcome out;
  std::mt19937_64 rng(4100);
  std::size_t verified = 0;
  for (int i = 0; i < 100; ++i) {
    std::size_t const n = 2 + rng() % 4;
    std::size_t const k = 1 + rng() % 2;
    std::vector<Transformation> gens(k, Transformation(n));
    for (auto& f : gens)
      for (auto& v : f) v = static_cast<Node>(rng() % n);
    UnaryAlgebra const A = close_composition(n, gens);
    auto const brute = oracle::closure(n, gens);
    if (A.maps != std::vector<Transformation>(brute.begin(), brute.end())) out.fail("closure differs from the oracle");
    LatticeTable const t = dual_congruence_table(A);
    if (t.relations().size() != oracle::congruences(n, brute).size()) out.fail("Con A differs from the oracle");
    auto const r = check_maltsev(t);
    if (r.verdict == Verdict::verified && r.complete_enumeration) {
      ++verified;
    } else {
      out.fail("algebra " + std::to_string(i) + ": " + to_string(r.verdict) +
               (r.complete_enumeration ? "" : " (enumeration incomplete)"));
    }
    if (oracle::maltsev_failure(t)) out.fail("algebra " + std::to_string(i) + ": oracle finds a failure");
    built_tables.push_back(t);
  }
  out.detail = std::to_string(verified) + "/100 verified with complete enumeration";
  return out;
}

// 6 ---------------------------------------------------------------------

Outcome principal_inclusion() {
  Outcome out;
  std::size_t violations = 0, maps = 0;
  for (auto const& t : built_tables) {
    auto const ends = endomorphisms(t, 200000);
    maps += ends.maps.size();
    violations += principal_inclusion_violations(t, ends.maps).size();
  }
  if (built_tables.size() != 105) out.fail("expected 105 tables from criteria 4 and 5");
  if (violations != 0) out.fail(std::to_string(violations) + " violations");
  if (out.pass) {
    out.detail = std::to_string(built_tables.size()) + " tables, " + std::to_string(maps) + " endomorphisms, 0 violations";
  }
  return out;
}

// 7 ---------------------------------------------------------------------

Outcome embeddings() {
  Outcome out;
  std::string sizes;
  for (auto const& [a, b] : std::vector<std::pair<std::string, std::string>>{{"2", "3-chain"}, {"2", "B2"}, {"3-chain", "N5"}}) {
    UslHom const phi = *canonical_hom(catalog_lattice(a), catalog_lattice(b));
    TableEmbedding const emb = embed_homogenized(phi, 1, 1000000);
    auto const r = verify_embedding(emb);
    if (!r.ok()) out.fail(a + " -> " + b + ": " + r.detail);
    sizes += (sizes.empty() ? "" : ", ") + a + "->" + b + " " + std::to_string(emb.source.node_count()) + "/" +
             std::to_string(emb.target.node_count());

    // Corruptions must be refuted, each with a witness.
    TableEmbedding swapped = emb;
    std::swap(swapped.node_map[2], swapped.node_map[3]);
    auto const rs = verify_embedding(swapped);
    if (rs.ok() || !(rs.witness_label || rs.witness_edge)) out.fail(a + " -> " + b + ": swapped nodes not refuted with a witness");

    TableEmbedding collapsed = emb;
    collapsed.node_map[3] = collapsed.node_map[2];
    auto const rc = verify_embedding(collapsed);
    if (rc.ok() || rc.injective || rc.detail.empty()) out.fail(a + " -> " + b + ": collapsed nodes not refuted");

    TableEmbedding rerouted = emb;
    rerouted.edge_map[1] = rerouted.edge_map[2];
    auto const re = verify_embedding(rerouted);
    if (re.ok() || re.colors || !re.witness_edge) out.fail(a + " -> " + b + ": rerouted edge not refuted");

    auto const reread = verify_embedding(embedding_from_json(embedding_to_json(swapped)));
    if (reread.ok()) out.fail(a + " -> " + b + ": corrupted embedding verifies after a JSON round trip");
  }
  if (out.pass) out.detail = sizes + " nodes; 4 corruptions refuted per map";
  return out;
}

// 8 ---------------------------------------------------------------------

Outcome assembly() {
  Outcome out;
  FiniteLattice const two = catalog_lattice("2"), c3 = catalog_lattice("3-chain"), b2 = catalog_lattice("B2");
  std::vector<UslHom> const homs{*canonical_hom(two, c3), *canonical_hom(c3, b2)};
  std::string detail;
  for (std::size_t J : {1, 2}) {
    auto const sys = assemble_system(homs, J, 1000000);
    if (!sys.ok()) out.fail("J = " + std::to_string(J) + ": " + sys.detail);
    auto const again = assemble_system(homs, J, 1000000);
    if (assembly_to_json(sys) != assembly_to_json(again)) out.fail("assembly report is not deterministic");
    detail += (detail.empty() ? "" : "; ") + std::string("J=") + std::to_string(J) + " h=" + nlohmann::json(sys.h).dump() +
              " m=" + nlohmann::json(sys.m).dump() + " base " + std::to_string(sys.graphs[0].node_count()) + " nodes";
  }
  if (out.pass) out.detail = detail;
  return out;
}

// 9 ---------------------------------------------------------------------

Outcome coding_round_trip() {
  Outcome out;
  std::size_t runs = 0;
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::set<std::size_t> u;
    for (std::size_t i = 0; i < 5; ++i)
      if (mask >> i & 1) u.insert(i);
    CodedLattice const c = build_coded_lattice(u, 5);
    for (Elem a = 0; a < c.lattice.size(); ++a)
      for (Elem b = 0; b < c.lattice.size(); ++b)
        if (oracle::lub(c.lattice, a, b) != c.lattice.join(a, b)) out.fail("join of L(U) differs from the oracle");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Presentation const pres = scramble(c, seed);
      PresentationOracle const o(pres);
      if (decode_u(o) != u) out.fail("decode of " + format_set(u) + " at seed " + std::to_string(seed));
      auto const g = decode_g_sequence(o, 5);
      for (std::size_t k = 0; k < 5; ++k)
        if (g[k] != pres.permutation[c.g[k]]) out.fail("g" + std::to_string(k) + " mismatch for " + format_set(u));
      ++runs;
    }
  }
  if (out.pass) out.detail = std::to_string(runs) + " decodes";
  return out;
}

// 10 --------------------------------------------------------------------

std::string slurp(fs::path const& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome out;
  std::vector<std::string> const configs = {
      "build --lattice catalog:N5 --stages 2 --format dot --out {dir}/build",
      "build --lattice catalog:2 --stages 2 --pudlak --out {dir}/pudlak",
      "check representation --lattice catalog:B2 --max-stage 3 --out {dir}/rep.json",
      "check maltsev --lattice catalog:2 --stage 1 --out {dir}/maltsev.json",
      "check embedding --source catalog:3-chain --target catalog:N5 --stage 1 --out {dir}/emb.json",
      "check assembly --chain 2,3-chain,B2 --stages 1 --out {dir}/assembly.json",
      "code --set 0,1,3 --n 5 --scramble-seed 7 --decode --out {dir}/pres.json",
      "stats --lattice catalog:M3 --stages 2 --out {dir}/stats.json",
  };
  fs::path const root = fs::temp_directory_path() / ("lattab-acceptance-" + std::to_string(std::random_device{}()));
  std::size_t files = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      fs::path const dir = root / std::to_string(run) / std::to_string(i);
      fs::create_directories(dir);
      std::string cmd = configs[i];
      for (auto pos = cmd.find("{dir}"); pos != std::string::npos; pos = cmd.find("{dir}"))
        cmd.replace(pos, 5, dir.string());
      std::string const line = std::string(LATTAB_CLI_PATH) + " " + cmd + " > " + (dir / "stdout.txt").string();
      int const status = std::system(line.c_str());
      if (status != 0) out.fail("'" + configs[i] + "' exited with status " + std::to_string(status));
      std::string all;
      std::vector<fs::path> paths;
      for (auto const& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) paths.push_back(fs::relative(e.path(), dir));
      std::sort(paths.begin(), paths.end());
      for (auto const& p : paths) {
        std::string text = slurp(dir / p);
        for (auto pos = text.find(dir.string()); pos != std::string::npos; pos = text.find(dir.string()))
          text.replace(pos, dir.string().size(), "{dir}");
        all += p.string() + "\n" + text;
      }
      outputs[run] = all;
      if (run == 0) files += paths.size();
    }
    if (outputs[0] != outputs[1]) out.fail("'" + configs[i] + "' differs between runs");
  }
  fs::remove_all(root);
  if (out.pass) out.detail = std::to_string(configs.size()) + " configurations, " + std::to_string(files) + " files byte-identical";
  return out;
}

struct Criterion {
  int id;
  char const* name;
  double limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  std::vector<Criterion> const criteria = {
      {1, "partition laws", 1, partition_laws},
      {2, "adjoint clauses over catalog homomorphisms", 10, adjoint_suite},
      {3, "stage coherence", 120, coherence},
      {4, "representation stages", 300, representation},
      {5, "dual Con A is Mal'tsev homogeneous", 300, unary_algebras},
      {6, "End(x,y) inside C(x,y)", 60, principal_inclusion},
      {7, "table embeddings", 300, embeddings},
      {8, "system assembly identity sweep", 120, assembly},
      {9, "coding round trip", 30, coding_round_trip},
      {10, "CLI determinism", 120, determinism},
  };
  int failed = 0;
  for (auto const& c : criteria) {
    auto const t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (std::exception const& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && secs > c.limit) r.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit) + " s");
    char timing[64];
    if (c.limit > 0) {
      std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", secs, c.limit);
    } else {
      std::snprintf(timing, sizeof timing, "%.2f s", secs);
    }
    std::cout << (r.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << r.detail << " (" << timing
              << ")" << std::endl;
    failed += !r.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
