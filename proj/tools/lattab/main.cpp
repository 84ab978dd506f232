#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using lattab::cli::RunConfig;

void lattice_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--lattice", cfg.lattice, "catalog:NAME or a lattice JSON file")->envname("LATTAB_LATTICE");
}

void budget_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--budget-nodes", cfg.budget_nodes, "node budget for graph builds")
      ->envname("LATTAB_BUDGET_NODES")
      ->check(CLI::PositiveNumber);
  app->add_option("--budget-endos", cfg.budget_endos, "visited partial maps for endomorphism enumeration")
      ->envname("LATTAB_BUDGET_ENDOS")
      ->check(CLI::PositiveNumber);
  app->add_option("--budget-search", cfg.budget_search, "visited partial maps per constrained search")
      ->envname("LATTAB_BUDGET_SEARCH")
      ->check(CLI::PositiveNumber);
}

void graph_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--stages", cfg.stages, "number of stages after stage 0")->envname("LATTAB_STAGES");
  auto* p = app->add_flag("--pudlak", cfg.pudlak, "one cell per edge per round");
  auto* h = app->add_flag("--homogenized", "j cells per edge at stage j (default)");
  p->excludes(h);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Lattice tables, Pudlak graphs and L(U) coding"};
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "seed for every randomized step")->envname("LATTAB_SEED");
  app.add_option("--jobs", cfg.jobs, "worker cap; results do not depend on it")
      ->envname("LATTAB_JOBS")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "output file (reports) or directory (build)")->envname("LATTAB_OUT");
  app.add_option("--format", cfg.format, "artifact format")
      ->envname("LATTAB_FORMAT")
      ->check(CLI::IsMember({"json", "dot"}));
  app.fallthrough();

  auto* build = app.add_subcommand("build", "build a staged colored graph and its tables");
  lattice_flags(build, cfg);
  graph_flags(build, cfg);
  budget_flags(build, cfg);

  auto* stats = app.add_subcommand("stats", "growth statistics of a staged build");
  lattice_flags(stats, cfg);
  graph_flags(stats, cfg);
  budget_flags(stats, cfg);

  auto* check = app.add_subcommand("check", "run a verification suite");
  check->add_option("name", cfg.check, "representation, maltsev, embedding, coherence, adjoint, assembly, sequential")
      ->check(CLI::IsMember({"representation", "maltsev", "embedding", "coherence", "adjoint", "assembly",
                             "sequential", "certificate"}));
  lattice_flags(check, cfg);
  graph_flags(check, cfg);
  budget_flags(check, cfg);
  check->add_option("--max-stage", cfg.max_stage, "last stage tried by representation")->envname("LATTAB_MAX_STAGE");
  check->add_option("--stage", cfg.stage, "single stage for maltsev or embedding");
  check->add_option("--source", cfg.source, "source lattice of a homomorphism");
  check->add_option("--target", cfg.target, "target lattice of a homomorphism");
  check->add_option("--map", cfg.map, "homomorphism as a=b,... by element names");
  check->add_option("--chain", cfg.chain, "comma-separated lattices for assembly");
  check->add_option("--table", cfg.table, "lattice table JSON");
  check->add_option("--tables", cfg.tables, "table JSON files forming a chain")->delimiter(',');
  check->add_option("--algebra", cfg.algebra, "unary algebra JSON {carrier, generators}");
  check->add_option("--embedding", cfg.embedding, "embedding JSON (or a report holding one)");
  check->add_option("--recheck-certificate", cfg.certificate, "homogeneity certificate JSON to re-verify");
  check->callback([&] {
    if (cfg.check.empty()) cfg.check = cfg.certificate.empty() ? "" : "certificate";
    if (cfg.check.empty()) throw CLI::ValidationError("check", "a check name is required");
  });

  auto* code = app.add_subcommand("code", "build, scramble and decode L(U)");
  code->add_option("--set", cfg.set, "U as a comma-separated list");
  code->add_option("--n", cfg.n, "number of g-atoms");
  code->add_option("--scramble-seed", cfg.scramble_seed, "presentation seed (defaults to --seed)")
      ->each([&](std::string const&) { cfg.scramble_seed_given = true; });
  code->add_flag("--decode", cfg.decode, "decode U back from the presentation");
  code->add_option("--presentation", cfg.presentation, "presentation JSON to decode");

  auto* exp = app.add_subcommand("export", "convert an artifact");
  exp->add_option("--in", cfg.input, "artifact JSON")->required();
  exp->add_option("--stage", cfg.stage, "graph mark to export (default: last)");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code_ = app.exit(e);
    return code_ == 0 ? 0 : lattab::cli::usage;
  }
  for (auto* sub : {build, stats, check, code, exp})
    if (sub->parsed()) cfg.command = sub->get_name();
  if (cfg.command == "export" && exp->count("--stage") == 0) cfg.stage = static_cast<std::size_t>(-1);
  return lattab::cli::run(cfg);
}
