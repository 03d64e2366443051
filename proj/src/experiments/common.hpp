#pragma once

// Helpers shared by the scenario implementations.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "covlab/experiments.hpp"

namespace covlab::exp {

/// Typed field access with diagnostics "params.alphas[1]: expected a number".
/// Every key read is remembered so finish() can reject unknown ones.
class Fields {
 public:
  Fields(const json& obj, std::string path);

  double number(const std::string& key);
  double positive(const std::string& key);
  std::int64_t integer(const std::string& key, std::int64_t lo, std::int64_t hi);
  bool boolean(const std::string& key);
  std::string text(const std::string& key, const std::vector<std::string>& allowed = {});
  std::vector<double> numbers(const std::string& key, std::size_t min_size = 1);
  std::vector<std::int64_t> integers(const std::string& key, std::int64_t lo, std::int64_t hi, std::size_t min_size = 1);
  Fields object(const std::string& key);
  bool has(const std::string& key) const { return obj_.contains(key); }
  const std::string& path() const { return path_; }

  /// Throws on any key that was never read.
  void finish() const;

 private:
  const json& at(const std::string& key);
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

/// Top-level config pieces every scenario shares.
struct Common {
  std::string scenario;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;  ///< derived per-trial seeds
};

/// Reads "scenario" and, when `seeded`, "seeds" and "master_seed". Rejects
/// unknown top-level fields; "params" and "thresholds" are left to the scenario.
Common read_common(const json& config, bool seeded);

/// Runs fn(i) for i in [0, n) on `jobs` threads. Results must be written to
/// index i so output order does not depend on scheduling. Rethrows the
/// exception of the lowest failing index.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double median(std::vector<double> v);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Appends a check and returns its pass flag.
bool add_check(ScenarioReport& report, std::string name, bool pass, std::string detail, json data = json::object());

// Scenario entry points, one per registry row.
json shrinking_balls_defaults();
ScenarioReport run_shrinking_balls(const json& config, const RunOptions& options);
json nonlinear_defaults();
ScenarioReport run_nonlinear(const json& config, const RunOptions& options);
json packing_defaults();
ScenarioReport run_packing(const json& config, const RunOptions& options);
json fat_cantor_defaults();
ScenarioReport run_fat_cantor(const json& config, const RunOptions& options);
json critical_defaults();
ScenarioReport run_critical(const json& config, const RunOptions& options);
json ball_energy_defaults();
ScenarioReport run_ball_energy(const json& config, const RunOptions& options);
json rectangles_defaults();
ScenarioReport run_rectangles(const json& config, const RunOptions& options);
json two_cubes_defaults();
ScenarioReport run_two_cubes(const json& config, const RunOptions& options);
json gauge_ball_defaults();
ScenarioReport run_gauge_ball(const json& config, const RunOptions& options);
json content_suite_defaults();
ScenarioReport run_content_suite(const json& config, const RunOptions& options);
json leb_split_defaults();
ScenarioReport run_leb_split(const json& config, const RunOptions& options);
json gamma_suite_defaults();
ScenarioReport run_gamma_suite(const json& config, const RunOptions& options);

}  // namespace covlab::exp
