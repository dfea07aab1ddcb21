#pragma once

#include "confik/logic.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace confik {

/// A step whose minimal models exceed this count aborts its run.
inline constexpr std::size_t kMinimalModelGuard = 100'000;

/// One random manual configuration process.
struct RunTrace {
  std::vector<std::pair<VarId, bool>> choices; // user decisions in order
  std::vector<std::size_t> minimal_counts;     // step 0, then after each choice
  bool aborted = false;                        // a step exceeded kMinimalModelGuard
};

struct SimulationStats {
  std::size_t runs = 0;
  std::size_t aborted_runs = 0;
  double length_mean = 0;     // user decisions per completed run
  double done_count_mean = 0; // steps with exactly one minimal model, per completed run
  double minmodels_mean = 0;  // over every recorded step of every run
  double minmodels_sd = 0;    // population standard deviation of the same
  std::size_t minmodels_max = 0;
  std::size_t steps = 0; // recorded steps
  std::uint64_t seed = 0;
};

/// Replays run `run` of a simulation with `seed`: start a session, then
/// repeatedly pick a uniform unassigned variable and a uniform value (the
/// other value if the first is rejected) until the session is complete.
/// Throws Error(UnsatInput) on an unsatisfiable input.
RunTrace simulate_run(const ClauseSet &cs, std::uint64_t seed, std::size_t run);

/// `runs` independent processes. Runs are spread over `threads` workers
/// (0 = hardware concurrency) and aggregated in run order, so the result
/// depends only on (cs, runs, seed).
SimulationStats simulate_manual(const ClauseSet &cs, std::size_t runs, std::uint64_t seed,
                                unsigned threads = 0, std::vector<RunTrace> *traces = nullptr);

struct TableRow {
  std::string name;
  std::size_t features = 0; // non-auxiliary variables
  std::size_t clauses = 0;  // after normalisation
  SimulationStats stats;
};

std::string csv_header();
std::string csv_row(const TableRow &row);
/// Human-readable table: a header line and one line per row.
std::string format_table(const std::vector<TableRow> &rows);

} // namespace confik
