#pragma once
// Command-line front end: spec-string parsing, run records, table
// reproduction grids, and CSV / JSON-lines output.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bcp/bm_formulas.hpp"
#include "bcp/jump_model.hpp"

namespace bcp::cli {

/// `poisson:<rate>`
JumpCountProcess parse_jumps(std::string_view spec);

/// `de:<p>,<eta_up>,<eta_down>` | `exp:<mean>` | `ber:<p>,<up>,<down>`
JumpSizeLaw parse_law(std::string_view spec);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// One configuration, as given on the command line.
struct RunSpec {
  std::string boundary = "constant:1";
  std::string law = "de:0.5,10,6.666666666666667";
  double lambda = 0.0;
  double t = 1.0;
  std::size_t reps = 200000;
  int n_points = 32;
  std::uint64_t seed = 42;
  std::string method = "engine";  // engine | oracle
  SeriesTolerance series{};
  double grid_step = 1e-3;        // oracle only
  std::size_t workers = 1;
};

struct RunRecord {
  RunSpec spec;
  double estimate = 0.0;
  double std_error = 0.0;
  double wall_time = 0.0;
};

RunRecord run(const RunSpec& spec);

enum class Table { Linear = 1, Nonlinear = 2 };

/// The 27-row grid: 3 boundaries x {DE, Exp, Ber} x lambda in {0, 0.01, 3}.
std::vector<RunSpec> table_specs(Table which, std::uint64_t seed, std::size_t reps);

enum class Format { Csv, Jsonl };

std::string csv_header();
std::string format_record(const RunRecord& r, Format f, bool timing = true);

/// Flags that re-run exactly the configuration echoed in `r`.
std::vector<std::string> to_flags(const RunRecord& r);

/// Entry point shared by the `bcp` executable and the tests. Returns the
/// process exit code: 0 ok, 2 usage error, 3 domain error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcp::cli
