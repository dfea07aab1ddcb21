#include "confik/simulate.hpp"

#include "confik/error.hpp"
#include "confik/random.hpp"
#include "confik/reasoning.hpp"
#include "confik/session.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace confik {

RunTrace simulate_run(const ClauseSet &cs, std::uint64_t seed, std::size_t run) {
  Session s = [&] {
    try {
      return new_session(cs);
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::UnsatModel)
        throw Error(ErrorKind::UnsatInput, e.what());
      throw;
    }
  }();
  Rng rng(derive_seed(seed, run));
  RunTrace trace;
  auto record = [&] {
    auto count = count_minimal_models(s.current(), kMinimalModelGuard);
    if (!count) {
      trace.aborted = true;
      return false;
    }
    trace.minimal_counts.push_back(*count);
    return true;
  };
  if (!record())
    return trace;
  while (!is_complete(s)) {
    VarId v = rng.pick(s.unassigned());
    bool value = rng.chance(1, 2);
    try {
      s = apply_decision(s, v, value);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::InconsistentDecision)
        throw;
      // Inference leaves both values open for every unassigned variable.
      value = !value;
      s = apply_decision(s, v, value);
    }
    trace.choices.emplace_back(v, value);
    if (!record())
      return trace;
  }
  return trace;
}

SimulationStats simulate_manual(const ClauseSet &cs, std::size_t runs, std::uint64_t seed,
                                unsigned threads, std::vector<RunTrace> *traces) {
  if (!solve(cs))
    throw Error(ErrorKind::UnsatInput, "the model admits no configuration");
  std::vector<RunTrace> all(runs);
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(runs, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t r; (r = next++) < runs && !failed;) {
      try {
        all[r] = simulate_run(cs, seed, r);
      } catch (...) {
        if (!failed.exchange(true))
          failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);

  SimulationStats st;
  st.runs = runs;
  st.seed = seed;
  std::size_t completed = 0;
  double length_sum = 0, done_sum = 0;
  double mean = 0, m2 = 0; // Welford, in run order
  for (const RunTrace &t : all) {
    for (std::size_t c : t.minimal_counts) {
      ++st.steps;
      double delta = static_cast<double>(c) - mean;
      mean += delta / static_cast<double>(st.steps);
      m2 += delta * (static_cast<double>(c) - mean);
      st.minmodels_max = std::max(st.minmodels_max, c);
    }
    if (t.aborted) {
      ++st.aborted_runs;
      continue;
    }
    ++completed;
    length_sum += static_cast<double>(t.choices.size());
    done_sum += static_cast<double>(std::count(t.minimal_counts.begin(), t.minimal_counts.end(), 1));
  }
  if (completed) {
    st.length_mean = length_sum / static_cast<double>(completed);
    st.done_count_mean = done_sum / static_cast<double>(completed);
  }
  st.minmodels_mean = mean;
  st.minmodels_sd = st.steps ? std::sqrt(m2 / static_cast<double>(st.steps)) : 0.0;
  if (traces)
    *traces = std::move(all);
  return st;
}

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

} // namespace

std::string csv_header() { return "name,features,clauses,length,done,minmodels_mean,minmodels_sd\n"; }

std::string csv_row(const TableRow &row) {
  return row.name + "," + std::to_string(row.features) + "," + std::to_string(row.clauses) + "," +
         fixed(row.stats.length_mean, 4) + "," + fixed(row.stats.done_count_mean, 4) + "," +
         fixed(row.stats.minmodels_mean, 4) + "," + fixed(row.stats.minmodels_sd, 4) + "\n";
}

std::string format_table(const std::vector<TableRow> &rows) {
  std::vector<std::vector<std::string>> cells{
      {"Name", "Features", "Clauses", "Length", "Done/run", "Minimal models"}};
  for (const TableRow &r : rows)
    cells.push_back({r.name, std::to_string(r.features), std::to_string(r.clauses),
                     fixed(r.stats.length_mean, 1), fixed(r.stats.done_count_mean, 1),
                     fixed(r.stats.minmodels_mean, 1) + " +- " + fixed(r.stats.minmodels_sd, 1)});
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto &line : cells)
    for (std::size_t i = 0; i < line.size(); ++i)
      width[i] = std::max(width[i], line[i].size());
  std::string out;
  for (const auto &line : cells) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      std::string cell = line[i];
      if (i + 1 < line.size())
        cell.resize(width[i], ' ');
      text += (i ? "  " : "") + cell;
    }
    out += text + "\n";
  }
  return out;
}

} // namespace confik
