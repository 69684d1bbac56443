#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "alk/lattice.hpp"

namespace alk::cli {

enum class Format { Json, Csv };

struct RunConfig {
  int precision_bits = 53;
  double tail_target = 1e-13;
  long long budget = kDefaultBudget;
  std::uint64_t seed = 7;
  Format format = Format::Json;

  // ALK_PRECISION overrides precision_bits when set.
  void apply_env();
};

// Bad flag content. `where` is the flag plus a JSON pointer into its value,
// e.g. "--tower/delta/1".
struct CliError : std::runtime_error {
  CliError(std::string where, const std::string& what)
      : std::runtime_error(what), where(std::move(where)) {}
  std::string where;
};

enum ExitCode { kOk = 0, kError = 1, kHypothesis = 2 };

// Runs one subcommand. The report goes to out, diagnostics to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

const std::vector<std::string>& subcommands();

}  // namespace alk::cli
