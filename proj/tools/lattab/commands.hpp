#ifndef LATTAB_TOOLS_COMMANDS_HPP
#define LATTAB_TOOLS_COMMANDS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lattab::cli {

enum Exit : int { ok = 0, refuted = 1, usage = 2, budget = 3, unknown = 4 };

struct RunConfig {
  std::string command;
  std::string check;  // check name for `check`

  std::string lattice = "catalog:2";
  std::string source;
  std::string target;
  std::string map;    // "a=b,..." by element names; empty = canonical
  std::string chain;  // comma-separated lattice specs
  std::size_t stages = 2;
  std::size_t stage = 1;
  bool pudlak = false;
  std::size_t budget_nodes = 1000000;
  std::size_t budget_endos = 200000;
  std::size_t budget_search = 20000;
  std::size_t max_stage = 3;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out;
  std::string format = "json";

  std::string table;
  std::vector<std::string> tables;
  std::string algebra;
  std::string embedding;
  std::string certificate;
  std::string presentation;
  std::string input;

  std::string set;
  std::size_t n = 0;
  std::uint64_t scramble_seed = 0;
  bool scramble_seed_given = false;
  bool decode = false;
};

int run(RunConfig const& cfg);

}  // namespace lattab::cli

#endif  // LATTAB_TOOLS_COMMANDS_HPP
