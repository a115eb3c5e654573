#include "ccik/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace ccik::bench {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits; avoids implementation-defined distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ManipulatorState draw_configuration(std::mt19937_64& rng, int n, const BenchmarkSpec& spec) {
  ManipulatorState state;
  state.segments.reserve(static_cast<std::size_t>(n));
  const double L = spec.nominal_length;
  for (int i = 0; i < n; ++i) {
    const double theta = spec.theta_max * unit(rng);
    const double phi = spec.phi_min + (spec.phi_max - spec.phi_min) * unit(rng);
    state.segments.push_back({theta / L, phi, L, L});
  }
  return state;
}

using CellKey = std::tuple<Method, int, int, double>;

CellKey key_of(const TrialRecord& r) { return {r.method, r.n_segments, r.iter_limit, r.tolerance}; }

}  // namespace

BenchmarkSpec BenchmarkSpec::desk_scale() {
  BenchmarkSpec spec;
  spec.iteration_limits = {500};
  spec.tolerances = {1e-4};
  spec.trials_per_config = 1000;
  return spec;
}

void BenchmarkSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("benchmark spec: " + what); };
  if (segment_counts.empty() || iteration_limits.empty() || tolerances.empty() || methods.empty()) {
    fail("segment counts, iteration limits, tolerances and methods must be non-empty");
  }
  if (trials_per_config < 1) fail("trials_per_config must be at least 1");
  if (!(theta_max >= 0.0 && theta_max <= 2.0 * std::numbers::pi)) {
    fail("theta_max must lie in [0, 2 pi]");
  }
  if (!(phi_max >= phi_min)) fail("phi range is empty");
  if (!(nominal_length > 0.0)) fail("nominal_length must be positive");
  for (int n : segment_counts) {
    if (n < 1 || static_cast<std::size_t>(n) > kDefaultMaxSegments) fail("segment count out of range");
  }
  for (int limit : iteration_limits) {
    if (limit < 1) fail("iteration limits must be at least 1");
  }
  for (double tol : tolerances) {
    if (!(tol > 0.0)) fail("tolerances must be positive");
  }
  for (Method m : methods) {
    SolverOptions opts = solver;
    opts.method = m;
    opts.validate();
  }
}

std::size_t BenchmarkSpec::cell_count() const {
  return methods.size() * segment_counts.size() * iteration_limits.size() * tolerances.size();
}

const SummaryCell* BenchmarkSummary::find(Method m, int n, int limit, double tol) const {
  for (const auto& c : cells) {
    if (c.method == m && c.n_segments == n && c.iter_limit == limit && c.tolerance == tol) return &c;
  }
  return nullptr;
}

std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto w : words) h = splitmix(h ^ splitmix(w));
  return h;
}

std::uint64_t target_seed(std::uint64_t master_seed, int n, int trial_index) {
  return hash_words({master_seed, static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(trial_index)});
}

std::uint64_t trial_seed(std::uint64_t master_seed, Method m, int n, int limit, double tol,
                         int trial_index) {
  return hash_words({master_seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(limit), std::bit_cast<std::uint64_t>(tol),
                     static_cast<std::uint64_t>(trial_index)});
}

Target sample_target(std::uint64_t seed, int n, const BenchmarkSpec& spec) {
  std::mt19937_64 rng(seed);
  Target t;
  t.configuration = draw_configuration(rng, n, spec);
  t.pose = forward_kinematics(t.configuration);
  return t;
}

TrialRecord run_trial(const BenchmarkSpec& spec, Method method, int n, int limit, double tol,
                      int trial_index) {
  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.method = method;
  rec.n_segments = n;
  rec.iter_limit = limit;
  rec.tolerance = tol;
  rec.seed = target_seed(spec.master_seed, n, trial_index);

  const Target target = sample_target(rec.seed, n, spec);
  for (const auto& seg : target.configuration.segments) {
    rec.target_kappa.push_back(seg.kappa);
    rec.target_phi.push_back(seg.phi);
  }
  rec.target_tip = target.pose.p;

  SolverOptions opts = spec.solver;
  opts.method = method;
  opts.tol = tol;
  opts.max_iter = limit;
  opts.record_trajectory = false;
  const std::vector<double> lengths(static_cast<std::size_t>(n), spec.nominal_length);

  const auto start = std::chrono::steady_clock::now();
  const SolveResult result =
      solve(make_initial_guess(static_cast<std::size_t>(n), lengths, opts), target.pose, opts);
  rec.wall_time_us = std::chrono::duration_cast<std::chrono::microseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();

  rec.converged = result.converged;
  rec.iterations = result.iterations;
  rec.final_error = result.final_error;
  rec.deadlock_any = result.any_deadlock();
  rec.fail_cause = result.fail_cause;
  return rec;
}

unsigned default_workers() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CC_IK_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

std::vector<TrialRecord> run_suite(const BenchmarkSpec& spec, unsigned workers) {
  spec.validate();
  struct Job {
    Method method;
    int n, limit;
    double tol;
    int index;
  };
  std::vector<Job> jobs;
  jobs.reserve(spec.trial_count());
  for (Method m : spec.methods)
    for (int n : spec.segment_counts)
      for (int limit : spec.iteration_limits)
        for (double tol : spec.tolerances)
          for (int k = 0; k < spec.trials_per_config; ++k) jobs.push_back({m, n, limit, tol, k});

  std::vector<TrialRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& j = jobs[i];
        records[i] = run_trial(spec, j.method, j.n, j.limit, j.tol, j.index);
        records[i].trial_id = i;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };

  if (workers == 0) workers = default_workers();
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return records;
}

namespace {

BenchmarkSummary summarise(const std::vector<TrialRecord>& records,
                           const std::vector<CellKey>& keys) {
  // trials (n, limit, tol, index) on which every method present converged
  std::vector<Method> methods;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  std::map<std::tuple<int, int, double, int>, int> converged_methods;
  for (const auto& r : records) {
    if (r.converged) ++converged_methods[{r.n_segments, r.iter_limit, r.tolerance, r.trial_index}];
  }

  struct Acc {
    int trials = 0, converged = 0, deadlocks = 0, paired = 0;
    double iters = 0.0, paired_iters = 0.0;
  };
  std::map<CellKey, Acc> acc;
  for (const auto& r : records) {
    Acc& a = acc[key_of(r)];
    ++a.trials;
    if (r.deadlock_any) ++a.deadlocks;
    if (!r.converged) continue;
    ++a.converged;
    a.iters += r.iterations;
    const auto it = converged_methods.find({r.n_segments, r.iter_limit, r.tolerance, r.trial_index});
    if (it != converged_methods.end() && it->second == static_cast<int>(methods.size())) {
      ++a.paired;
      a.paired_iters += r.iterations;
    }
  }

  BenchmarkSummary summary;
  for (const auto& key : keys) {
    SummaryCell cell;
    std::tie(cell.method, cell.n_segments, cell.iter_limit, cell.tolerance) = key;
    const auto it = acc.find(key);
    if (it == acc.end()) {
      cell.empty = true;
      summary.cells.push_back(cell);
      continue;
    }
    const Acc& a = it->second;
    cell.trial_count = a.trials;
    cell.converged_count = a.converged;
    cell.success_rate = static_cast<double>(a.converged) / a.trials;
    cell.deadlock_rate = static_cast<double>(a.deadlocks) / a.trials;
    if (a.converged > 0) cell.mean_iter_converged = a.iters / a.converged;
    if (a.paired > 0) cell.mean_iter_paired = a.paired_iters / a.paired;
    summary.cells.push_back(cell);
  }
  return summary;
}

}  // namespace

BenchmarkSummary aggregate(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  std::vector<CellKey> keys;
  for (const auto& r : records) keys.push_back(key_of(r));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return summarise(records, keys);
}

BenchmarkSummary aggregate(const std::vector<TrialRecord>& records, const BenchmarkSpec& spec) {
  std::vector<CellKey> keys;
  for (Method m : spec.methods)
    for (int n : spec.segment_counts)
      for (int limit : spec.iteration_limits)
        for (double tol : spec.tolerances) keys.emplace_back(m, n, limit, tol);
  return summarise(records, keys);
}

std::optional<double> paired_mean_iterations(const std::vector<TrialRecord>& records,
                                             Method method, const std::vector<Method>& compared,
                                             int n, int limit, double tol) {
  std::map<int, std::map<Method, const TrialRecord*>> by_trial;
  for (const auto& r : records) {
    if (r.n_segments == n && r.iter_limit == limit && r.tolerance == tol) {
      by_trial[r.trial_index][r.method] = &r;
    }
  }
  double sum = 0.0;
  int count = 0;
  for (const auto& [index, per_method] : by_trial) {
    const bool all = std::all_of(compared.begin(), compared.end(), [&](Method m) {
      const auto it = per_method.find(m);
      return it != per_method.end() && it->second->converged;
    });
    const auto self = per_method.find(method);
    if (!all || self == per_method.end() || !self->second->converged) continue;
    sum += self->second->iterations;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

std::vector<WorkspacePoint> sample_workspace(std::uint64_t seed, int n, int count,
                                             const BenchmarkSpec& spec) {
  if (count < 1) throw std::invalid_argument("sample_workspace: count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<WorkspacePoint> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ManipulatorState config = draw_configuration(rng, n, spec);
    const Eigen::Vector3d tip = forward_kinematics(config).p;
    points.push_back({tip, std::move(config)});
  }
  return points;
}

}  // namespace ccik::bench
