#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lattab/algebra.hpp"
#include "lattab/coding.hpp"
#include "lattab/error.hpp"
#include "lattab/lattice.hpp"
#include "lattab/morphism.hpp"
#include "lattab/pudlak.hpp"
#include "lattab/table.hpp"

namespace lattab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : Error {
  using Error::Error;
};

json load_json(std::string const& path) {
  if (path.empty()) throw UsageError("missing input file");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (json::exception const& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_text(std::string const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

void write_json(std::string const& path, json const& j) { write_text(path, j.dump(2) + "\n"); }

void emit(RunConfig const& cfg, json const& report) {
  if (!cfg.out.empty()) write_json(cfg.out, report);
}

FiniteLattice lattice_spec(std::string const& spec) {
  if (spec.empty()) throw UsageError("missing lattice");
  if (spec.rfind("catalog:", 0) == 0) {
    try {
      return catalog_lattice(spec.substr(8));
    } catch (InvalidArgument const& e) {
      throw UsageError(e.what());
    }
  }
  return lattice_from_json(load_json(spec));
}

std::vector<std::string> split(std::string const& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

UslHom hom_spec(FiniteLattice const& source, FiniteLattice const& target, std::string const& map) {
  if (map.empty()) {
    auto phi = canonical_hom(source, target);
    if (!phi) throw UsageError("no injective homomorphism between the given lattices");
    return *phi;
  }
  std::vector<Elem> values(source.size(), target.size());
  for (auto const& item : split(map, ',')) {
    auto const eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("map item '" + item + "' is not a=b");
    values[source.at(item.substr(0, eq))] = target.at(item.substr(eq + 1));
  }
  for (Elem v : values)
    if (v == target.size()) throw UsageError("map does not cover every source element");
  return UslHom(source, target, std::move(values));
}

ColoredGraph build_graph(RunConfig const& cfg, FiniteLattice const& L, std::size_t stages) {
  return cfg.pudlak ? build_pudlak(L, stages, cfg.budget_nodes) : build_homogenized(L, stages, cfg.budget_nodes);
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::verified:
      return Exit::ok;
    case Verdict::refuted:
      return Exit::refuted;
    case Verdict::unknown:
      break;
  }
  return Exit::unknown;
}

json stats_json(ColoredGraph const& g) {
  auto rows = json::array();
  for (auto const& r : growth_stats(g)) {
    json hist = json::object();
    for (Elem a = 0; a < r.histogram.size(); ++a) hist[g.lattice().name(a)] = r.histogram[a];
    rows.push_back({{"stage", r.stage},
                    {"rounds", r.rounds},
                    {"copies", r.copies},
                    {"nodes", r.nodes},
                    {"edges", r.edges},
                    {"colors", std::move(hist)}});
  }
  return rows;
}

void print_stats(ColoredGraph const& g) {
  std::cout << "stage rounds copies nodes edges\n";
  for (auto const& r : growth_stats(g))
    std::cout << r.stage << " " << r.rounds << " " << r.copies << " " << r.nodes << " " << r.edges << "\n";
}

// build / stats ---------------------------------------------------------

int cmd_build(RunConfig const& cfg) {
  FiniteLattice const L = lattice_spec(cfg.lattice);
  ColoredGraph const g = build_graph(cfg, L, cfg.stages);
  fs::path const dir = cfg.out.empty() ? fs::path("lattab-out") : fs::path(cfg.out);
  fs::create_directories(dir);
  write_json((dir / "graph.json").string(), graph_to_json(g));
  for (std::size_t s = 0; s < g.stages().size(); ++s)
    write_json((dir / ("table-" + std::to_string(s) + ".json")).string(), table_to_json(table_of(g, s)));
  write_json((dir / "stats.json").string(), stats_json(g));
  if (cfg.format == "dot") write_text((dir / "graph.dot").string(), graph_to_dot(g, g.stages().size() - 1));
  std::cout << (cfg.pudlak ? "pudlak" : "homogenized") << " build, " << L.size() << "-element lattice, written to "
            << dir.string() << "\n";
  print_stats(g);
  return Exit::ok;
}

int cmd_stats(RunConfig const& cfg) {
  ColoredGraph const g = build_graph(cfg, lattice_spec(cfg.lattice), cfg.stages);
  print_stats(g);
  emit(cfg, stats_json(g));
  return Exit::ok;
}

// checks ----------------------------------------------------------------

int check_representation(RunConfig const& cfg) {
  FiniteLattice const L = lattice_spec(cfg.lattice);
  RepresentationOptions opts;
  opts.max_stage = cfg.max_stage;
  opts.node_budget = cfg.budget_nodes;
  opts.homogenized = !cfg.pudlak;
  opts.endo_budget = cfg.budget_search;
  auto const r = verify_representation(L, opts);

  json stages = json::array();
  for (auto const& s : r.stages) {
    stages.push_back({{"stage", s.stage},
                      {"nodes", s.nodes},
                      {"edges", s.edges},
                      {"injective", s.injective},
                      {"order", s.order},
                      {"join_to_meet", s.join_to_meet},
                      {"meet_to_join", s.meet_to_join ? json(*s.meet_to_join) : json(nullptr)},
                      {"meet_to_join_local", s.meet_to_join_local},
                      {"passed", s.passed()},
                      {"detail", s.detail}});
  }
  Verdict const v = r.stage ? Verdict::verified : r.budget_exhausted ? Verdict::unknown : Verdict::refuted;
  json report{{"check", "representation"},
              {"lattice", lattice_to_json(L)},
              {"mode", cfg.pudlak ? "pudlak" : "homogenized"},
              {"verdict", to_string(v)},
              {"stage", r.stage ? json(*r.stage) : json(nullptr)},
              {"budget_exhausted", r.budget_exhausted},
              {"stages", std::move(stages)},
              {"endomorphism_diagnostic",
               {{"checked", r.diagnostic.checked},
                {"exact", r.diagnostic.exact},
                {"sampled", r.diagnostic.sampled},
                {"outside", r.diagnostic.outside}}}};
  emit(cfg, report);
  std::cout << "representation: " << to_string(v);
  if (r.stage) std::cout << " at stage " << *r.stage << " (" << r.stages.at(*r.stage).nodes << " nodes)";
  std::cout << "\n";
  return verdict_exit(v);
}

LatticeTable table_input(RunConfig const& cfg) {
  if (!cfg.table.empty()) return table_from_json(load_json(cfg.table));
  if (!cfg.algebra.empty()) {
    json const j = load_json(cfg.algebra);
    try {
      auto const n = j.at("carrier").get<std::size_t>();
      auto const gens = j.at("generators").get<std::vector<Transformation>>();
      ClosureOptions opts;
      opts.adjoin_identity = j.value("adjoin_identity", false);
      return dual_congruence_table(close_composition(n, gens, opts));
    } catch (json::exception const& e) {
      throw UsageError(cfg.algebra + ": " + e.what());
    }
  }
  FiniteLattice const L = lattice_spec(cfg.lattice);
  ColoredGraph const g = build_graph(cfg, L, cfg.stage);
  return table_of(g, cfg.stage);
}

int check_maltsev(RunConfig const& cfg) {
  LatticeTable const t = table_input(cfg);
  MaltsevOptions opts;
  opts.enumeration_budget = cfg.budget_endos;
  opts.search_budget = cfg.budget_search;
  auto const r = lattab::check_maltsev(t, opts);
  json certs = json::array();
  for (auto const& c : r.certificates) certs.push_back(certificate_to_json(c, t));
  json report{{"check", "maltsev"},
              {"verdict", to_string(r.verdict)},
              {"nodes", t.size()},
              {"complete_enumeration", r.complete_enumeration},
              {"endomorphisms", r.endomorphisms},
              {"premise_quadruples", r.premise_quadruples},
              {"certified", r.certified},
              {"certificates", std::move(certs)}};
  std::cout << "maltsev: " << to_string(r.verdict) << ", " << r.certified << "/" << r.premise_quadruples
            << " quadruples certified";
  if (r.witness) {
    auto const& w = *r.witness;
    json ids = json::array();
    for (auto p : w) ids.push_back(t.nodes()[p]);
    report["witness"] = ids;
    std::cout << ", witness (" << ids[0] << ", " << ids[1] << ", " << ids[2] << ", " << ids[3] << ")";
  }
  std::cout << "\n";
  emit(cfg, report);
  return verdict_exit(r.verdict);
}

int check_certificate(RunConfig const& cfg) {
  if (cfg.table.empty()) throw UsageError("--recheck-certificate needs --table");
  LatticeTable const t = table_from_json(load_json(cfg.table));
  json const j = load_json(cfg.certificate);
  std::string why;
  bool ok = false;
  try {
    ok = recheck_certificate(t, certificate_from_json(j, t), &why);
  } catch (InvalidArgument const& e) {
    why = e.what();
  }
  emit(cfg, json{{"check", "certificate"}, {"verdict", ok ? "verified" : "refuted"}, {"detail", why}});
  std::cout << "certificate: " << (ok ? "verified" : "refuted") << (why.empty() ? "" : ", " + why) << "\n";
  return ok ? Exit::ok : Exit::refuted;
}

int check_embedding(RunConfig const& cfg) {
  TableEmbedding emb = [&] {
    if (!cfg.embedding.empty()) {
      json j = load_json(cfg.embedding);
      if (j.contains("embedding")) j = j.at("embedding");
      try {
        return embedding_from_json(j, cfg.budget_nodes);
      } catch (json::exception const& e) {
        throw UsageError(cfg.embedding + ": " + e.what());
      }
    }
    UslHom const phi = hom_spec(lattice_spec(cfg.source), lattice_spec(cfg.target), cfg.map);
    return embed_homogenized(phi, cfg.stage, cfg.budget_nodes);
  }();
  auto const r = verify_embedding(emb);
  json report{{"check", "embedding"},
              {"verdict", r.ok() ? "verified" : "refuted"},
              {"injective", r.injective},
              {"base_edge", r.base_edge},
              {"colors", r.colors},
              {"subtable", r.subtable},
              {"label_transport", r.label_transport},
              {"pairs_checked", r.pairs_checked},
              {"detail", r.detail},
              {"source_nodes", emb.source.node_count()},
              {"target_nodes", emb.target.node_count()},
              {"embedding", embedding_to_json(emb)}};
  if (r.witness_label) {
    report["witness"] = {{"x", *r.witness_x}, {"y", *r.witness_y}, {"label", emb.phi.source().name(*r.witness_label)}};
  }
  emit(cfg, report);
  std::cout << "embedding: " << (r.ok() ? "verified" : "refuted") << ", " << emb.source.node_count() << " -> "
            << emb.target.node_count() << " nodes";
  if (!r.ok()) std::cout << ", " << r.detail;
  std::cout << "\n";
  return r.ok() ? Exit::ok : Exit::refuted;
}

int check_coherence(RunConfig const& cfg) {
  ColoredGraph const g = build_graph(cfg, lattice_spec(cfg.lattice), cfg.stages);
  json pairs = json::array();
  bool all = true;
  for (std::size_t s = 0; s + 1 < g.stages().size(); ++s) {
    LatticeTable const small = table_of(g, s);
    LatticeTable const big = table_of(g, s + 1);
    bool const restricted = restrict_table(big, small.nodes()).table == small;
    auto const sub = check_subtable(small, big);
    all = all && restricted && sub.ok;
    pairs.push_back({{"stage", s}, {"restriction_equal", restricted}, {"subtable", sub.ok}, {"detail", sub.reason}});
  }
  emit(cfg, json{{"check", "coherence"}, {"verdict", all ? "verified" : "refuted"}, {"pairs", std::move(pairs)}});
  std::cout << "coherence: " << (all ? "verified" : "refuted") << " over " << g.stages().size() << " stages\n";
  return all ? Exit::ok : Exit::refuted;
}

int check_adjoint(RunConfig const& cfg) {
  std::vector<std::pair<FiniteLattice, FiniteLattice>> pairs;
  if (!cfg.source.empty() || !cfg.target.empty()) {
    pairs.emplace_back(lattice_spec(cfg.source), lattice_spec(cfg.target));
  } else {
    for (auto const& a : catalog_names())
      for (auto const& b : catalog_names()) pairs.emplace_back(catalog_lattice(a), catalog_lattice(b));
  }
  std::size_t homs = 0;
  json failures = json::array();
  for (auto const& [s, t] : pairs) {
    for (auto const& phi : enumerate_usl_homs(s, t)) {
      ++homs;
      std::vector<Elem> adj;
      std::string why;
      try {
        adj = galois_adjoint(phi);
      } catch (InternalError const& e) {
        why = e.what();
      }
      if (why.empty()) {
        auto const rep = check_adjoint_clauses(phi, adj);
        if (!rep.ok()) why = rep.witness;
      }
      if (!why.empty()) failures.push_back({{"map", phi.map()}, {"detail", why}});
    }
  }
  bool const ok = failures.empty();
  emit(cfg, json{{"check", "adjoint"}, {"verdict", ok ? "verified" : "refuted"}, {"homomorphisms", homs},
                 {"failures", std::move(failures)}});
  std::cout << "adjoint: " << (ok ? "verified" : "refuted") << " over " << homs << " homomorphisms\n";
  return ok ? Exit::ok : Exit::refuted;
}

int check_assembly(RunConfig const& cfg) {
  auto const specs = split(cfg.chain, ',');
  if (specs.size() < 2) throw UsageError("--chain needs at least two lattices");
  std::vector<FiniteLattice> lattices;
  for (auto const& s : specs) lattices.push_back(lattice_spec(s.find(':') == std::string::npos && !fs::exists(s) ? "catalog:" + s : s));
  std::vector<UslHom> homs;
  for (std::size_t i = 0; i + 1 < lattices.size(); ++i) homs.push_back(hom_spec(lattices[i], lattices[i + 1], ""));
  auto const sys = assemble_system(homs, cfg.stages, cfg.budget_nodes);
  json report = assembly_to_json(sys);
  report["check"] = "assembly";
  report["verdict"] = sys.ok() ? "verified" : "refuted";
  emit(cfg, report);
  std::cout << "assembly: " << (sys.ok() ? "verified" : "refuted") << ", h = " << json(sys.h).dump()
            << ", m = " << json(sys.m).dump() << "\n";
  if (!sys.ok()) std::cout << sys.detail << "\n";
  return sys.ok() ? Exit::ok : Exit::refuted;
}

int check_sequential(RunConfig const& cfg) {
  TableChain chain;
  if (!cfg.tables.empty()) {
    for (auto const& f : cfg.tables) chain.tables.push_back(table_from_json(load_json(f)));
  } else {
    ColoredGraph const g = build_graph(cfg, lattice_spec(cfg.lattice), cfg.stages);
    for (std::size_t s = 0; s < g.stages().size(); ++s) chain.tables.push_back(table_of(g, s));
  }
  auto const r = lattab::check_sequential(chain, cfg.budget_search);
  auto clause = [](ClauseResult const& c) { return json{{"verdict", to_string(c.verdict)}, {"detail", c.detail}}; };
  Verdict v = Verdict::verified;
  for (auto const* c : {&r.usl_stages, &r.lattice_union, &r.meet_interpolants, &r.homogeneity, &r.coherent}) {
    if (c->verdict == Verdict::refuted) v = Verdict::refuted;
    if (c->verdict == Verdict::unknown && v == Verdict::verified) v = Verdict::unknown;
  }
  emit(cfg, json{{"check", "sequential"},
                 {"verdict", to_string(v)},
                 {"stages", chain.tables.size()},
                 {"usl_stages", clause(r.usl_stages)},
                 {"lattice_union", clause(r.lattice_union)},
                 {"meet_interpolants", clause(r.meet_interpolants)},
                 {"homogeneity", clause(r.homogeneity)},
                 {"coherent", clause(r.coherent)}});
  std::cout << "sequential: " << to_string(v) << " (usl " << to_string(r.usl_stages.verdict) << ", union "
            << to_string(r.lattice_union.verdict) << ", meet " << to_string(r.meet_interpolants.verdict)
            << ", homogeneity " << to_string(r.homogeneity.verdict) << ", coherent " << to_string(r.coherent.verdict)
            << ")\n";
  return verdict_exit(v);
}

int cmd_check(RunConfig const& cfg) {
  if (cfg.check == "representation") return check_representation(cfg);
  if (cfg.check == "maltsev") return check_maltsev(cfg);
  if (cfg.check == "certificate") return check_certificate(cfg);
  if (cfg.check == "embedding") return check_embedding(cfg);
  if (cfg.check == "coherence") return check_coherence(cfg);
  if (cfg.check == "adjoint") return check_adjoint(cfg);
  if (cfg.check == "assembly") return check_assembly(cfg);
  if (cfg.check == "sequential") return check_sequential(cfg);
  throw UsageError("unknown check '" + cfg.check + "'");
}

// code ------------------------------------------------------------------

int cmd_code(RunConfig const& cfg) {
  Presentation pres;
  if (!cfg.presentation.empty()) {
    pres = presentation_from_json(load_json(cfg.presentation));
  } else {
    if (cfg.n == 0) throw UsageError("--n must be at least 1");
    CodedLattice const coded = build_coded_lattice(parse_set(cfg.set), cfg.n);
    pres = scramble(coded, cfg.scramble_seed_given ? cfg.scramble_seed : cfg.seed);
    std::cout << "L(U): " << coded.lattice.size() << " elements, N = " << cfg.n << ", seed " << pres.seed << "\n";
  }
  if (!cfg.out.empty()) write_json(cfg.out, presentation_to_json(pres));
  if (!cfg.decode) return Exit::ok;

  PresentationOracle const oracle(pres);
  auto const g = decode_g_sequence(oracle, oracle.g_count());
  auto const u = decode_u(oracle);
  std::cout << "U = " << format_set(u) << "\n";
  std::cout << "g = " << json(g).dump() << "\n";

  bool ok = true;
  if (pres.u && *pres.u != u) {
    std::cout << "mismatch: encoded U = " << format_set(*pres.u) << "\n";
    ok = false;
  }
  if (pres.permutation.size() == pres.n && pres.names.size() == pres.n) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      auto it = std::find(pres.names.begin(), pres.names.end(), "g" + std::to_string(k));
      if (it == pres.names.end() || pres.permutation[static_cast<std::size_t>(it - pres.names.begin())] != g[k]) {
        std::cout << "mismatch: g" << k << " decoded as " << g[k] << "\n";
        ok = false;
        break;
      }
    }
  }
  return ok ? Exit::ok : Exit::refuted;
}

// export ----------------------------------------------------------------

int cmd_export(RunConfig const& cfg) {
  json const j = load_json(cfg.input);
  std::string text;
  if (j.contains("edges") && j.contains("stages")) {
    ColoredGraph const g = graph_from_json(j, cfg.budget_nodes);
    std::size_t const last = g.stages().size() - 1;
    if (cfg.stage != static_cast<std::size_t>(-1) && cfg.stage > last) throw UsageError("no such stage");
    std::size_t const stage = std::min(cfg.stage, last);
    text = cfg.format == "dot" ? graph_to_dot(g, stage) : graph_to_json(g).dump(2) + "\n";
  } else if (j.contains("relations")) {
    if (cfg.format == "dot") throw UsageError("tables have no DOT form");
    text = table_to_json(table_from_json(j)).dump(2) + "\n";
  } else if (j.contains("leqFacts")) {
    if (cfg.format == "dot") throw UsageError("presentations have no DOT form");
    text = presentation_to_json(presentation_from_json(j)).dump(2) + "\n";
  } else {
    throw UsageError(cfg.input + " is not a graph, table or presentation");
  }
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    write_text(cfg.out, text);
  }
  return Exit::ok;
}

}  // namespace

int run(RunConfig const& cfg) {
  try {
    if (cfg.command == "build") return cmd_build(cfg);
    if (cfg.command == "stats") return cmd_stats(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
    if (cfg.command == "code") return cmd_code(cfg);
    if (cfg.command == "export") return cmd_export(cfg);
    throw UsageError("unknown command");
  } catch (BudgetExceeded const& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return cfg.command == "check" ? Exit::unknown : Exit::budget;
  } catch (DecodeError const& e) {
    std::cerr << "decode: " << e.what() << "\n";
    return Exit::refuted;
  } catch (UsageError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  } catch (InvalidArgument const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  } catch (InternalError const& e) {
    std::cerr << "internal: " << e.what() << "\n";
    return Exit::refuted;
  } catch (fs::filesystem_error const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  }
}

}  // namespace lattab::cli
