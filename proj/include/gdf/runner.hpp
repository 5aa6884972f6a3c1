#ifndef GDF_RUNNER_HPP
#define GDF_RUNNER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace gdf {

struct RunOptions {
  std::string subcommand;
  std::string config_path;  // unused by selftest
  std::string out_dir;      // overrides the config's [output] dir when nonempty
  std::optional<std::uint64_t> seed;
  int threads = 1;
  double tol_scale = 1.0;
};

// Executes one subcommand. Returns the process exit code: 0 success,
// 2 config error, 3 numerical failure (the violated invariant is reported).
int run(const RunOptions& opt, std::ostream& out, std::ostream& err);

// Built-in battery of pinned small examples; returns 0 or 3.
int run_selftest(std::ostream& out);

}  // namespace gdf

#endif  // GDF_RUNNER_HPP
