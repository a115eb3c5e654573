#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

#include "ccik/bench.hpp"
#include "support.hpp"

using namespace ccik;
using namespace ccik::bench;
using ccik::testing::kPi;

namespace {

BenchmarkSpec tiny(std::vector<Method> methods, std::vector<int> ns, int trials) {
  BenchmarkSpec spec = BenchmarkSpec::desk_scale();
  spec.methods = std::move(methods);
  spec.segment_counts = std::move(ns);
  spec.trials_per_config = trials;
  return spec;
}

bool same_outcome(const TrialRecord& a, const TrialRecord& b) {
  return a.trial_id == b.trial_id && a.trial_index == b.trial_index && a.method == b.method &&
         a.n_segments == b.n_segments && a.iter_limit == b.iter_limit && a.tolerance == b.tolerance &&
         a.seed == b.seed && a.target_kappa == b.target_kappa && a.target_phi == b.target_phi &&
         a.target_tip == b.target_tip && a.converged == b.converged && a.iterations == b.iterations &&
         a.final_error == b.final_error && a.deadlock_any == b.deadlock_any &&
         a.fail_cause == b.fail_cause;
}

TrialRecord record(Method m, int index, bool converged, int iterations, bool deadlock = false) {
  TrialRecord r;
  r.method = m;
  r.n_segments = 3;
  r.iter_limit = 500;
  r.tolerance = 1e-4;
  r.trial_index = index;
  r.converged = converged;
  r.iterations = iterations;
  r.deadlock_any = deadlock;
  r.fail_cause = converged ? FailCause::None : FailCause::MaxIter;
  return r;
}

}  // namespace

TEST_CASE("spec validation and sizes") {
  const BenchmarkSpec full;
  CHECK_NOTHROW(full.validate());
  CHECK(full.cell_count() == 3 * 6 * 5 * 3);
  const BenchmarkSpec desk = BenchmarkSpec::desk_scale();
  CHECK(desk.trial_count() == 18000);

  BenchmarkSpec bad = desk;
  bad.methods.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = desk;
  bad.trials_per_config = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = desk;
  bad.theta_max = 7.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = desk;
  bad.theta_max = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = desk;
  bad.tolerances = {0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("seeding") {
  CHECK(hash_words({1, 2, 3}) == hash_words({1, 2, 3}));
  CHECK(hash_words({1, 2, 3}) != hash_words({1, 3, 2}));
  CHECK(target_seed(1, 4, 7) == target_seed(1, 4, 7));
  CHECK(target_seed(1, 4, 7) != target_seed(2, 4, 7));
  CHECK(target_seed(1, 4, 7) != target_seed(1, 5, 7));
  CHECK(trial_seed(1, Method::Jacobian, 4, 500, 1e-4, 7) != trial_seed(1, Method::Vvl, 4, 500, 1e-4, 7));
}

TEST_CASE("sample_target") {
  BenchmarkSpec spec;
  SUBCASE("zero bending range gives the straight pose") {
    spec.theta_max = 0.0;
    const Target t = sample_target(5, 3, spec);
    for (const auto& seg : t.configuration.segments) CHECK(seg.kappa == 0.0);
    CHECK((t.pose.p - Eigen::Vector3d(0, 0, 3)).norm() <= 1e-12);
  }

  SUBCASE("deterministic and reachable") {
    const Target a = sample_target(99, 4, spec);
    const Target b = sample_target(99, 4, spec);
    CHECK(a.configuration == b.configuration);
    CHECK(a.pose.matrix() == b.pose.matrix());
    CHECK(forward_kinematics(a.configuration).matrix() == a.pose.matrix());
  }

  SUBCASE("bending angles are uniform on [0, theta_max]") {
    double sum = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
      for (const auto& seg : sample_target(seed, 5, spec).configuration.segments) {
        const double theta = seg.bending_angle();
        CHECK_UNARY(theta >= 0.0);
        CHECK_UNARY(theta <= spec.theta_max);
        CHECK_UNARY(seg.phi >= 0.0);
        CHECK_UNARY(seg.phi < 2 * kPi);
        sum += theta;
        ++count;
      }
    }
    REQUIRE(count == 100000);
    CHECK(std::abs(sum / count - spec.theta_max / 2) <= 0.01 * spec.theta_max / 2);
  }
}

TEST_CASE("run_trial") {
  SUBCASE("straight targets converge quickly for every method") {
    BenchmarkSpec spec = tiny({Method::Jacobian, Method::Dls, Method::Vvl}, {3}, 1);
    spec.theta_max = 0.0;
    for (Method m : spec.methods) {
      const TrialRecord r = run_trial(spec, m, 3, 500, 1e-4, 0);
      CHECK(r.converged);
      CHECK(r.iterations <= 20);
    }
  }

  SUBCASE("targets are paired across methods, limits and tolerances") {
    const BenchmarkSpec spec = tiny({Method::Jacobian, Method::Vvl}, {4}, 5);
    for (int k = 0; k < 5; ++k) {
      const TrialRecord j = run_trial(spec, Method::Jacobian, 4, 30, 1e-6, k);
      const TrialRecord v = run_trial(spec, Method::Vvl, 4, 500, 1e-4, k);
      CHECK(j.seed == v.seed);
      CHECK(j.target_kappa == v.target_kappa);
      CHECK(j.target_phi == v.target_phi);
      CHECK(j.target_tip == v.target_tip);
      CHECK(j.iterations <= 30);
      if (v.converged) CHECK(v.final_error <= 1e-4);
    }
  }

  SUBCASE("rerun reproduces every field but wall time") {
    const BenchmarkSpec spec = tiny({Method::Dls}, {5}, 1);
    CHECK(same_outcome(run_trial(spec, Method::Dls, 5, 100, 1e-6, 3),
                       run_trial(spec, Method::Dls, 5, 100, 1e-6, 3)));
  }
}

TEST_CASE("run_suite") {
  const BenchmarkSpec one = tiny({Method::Jacobian}, {2}, 10);
  CHECK(run_suite(one, 1).size() == 10);

  BenchmarkSpec spec = tiny({Method::Jacobian, Method::Vvl, Method::Dls}, {2, 3}, 6);
  spec.iteration_limits = {30, 160};
  spec.tolerances = {1e-4, 1e-6};
  const auto serial = run_suite(spec, 1);
  const auto parallel = run_suite(spec, 4);
  REQUIRE(serial.size() == spec.trial_count());
  REQUIRE(parallel.size() == serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].trial_id == i);
    CHECK(same_outcome(serial[i], parallel[i]));
  }

  SUBCASE("canonical order") {
    for (std::size_t i = 1; i < serial.size(); ++i) {
      const auto& a = serial[i - 1];
      const auto& b = serial[i];
      const auto pos = [](const auto& v, const auto& x) { return std::find(v.begin(), v.end(), x) - v.begin(); };
      const auto rank = [&](const TrialRecord& r) {
        return std::tuple(pos(spec.methods, r.method), pos(spec.segment_counts, r.n_segments),
                          pos(spec.iteration_limits, r.iter_limit), pos(spec.tolerances, r.tolerance),
                          r.trial_index);
      };
      CHECK(rank(a) < rank(b));
    }
  }

  SUBCASE("larger budgets never lower the success rate") {
    const BenchmarkSummary s = aggregate(serial, spec);
    for (Method m : spec.methods) {
      for (int n : spec.segment_counts) {
        for (double tol : spec.tolerances) {
          CHECK(s.find(m, n, 160, tol)->success_rate >= s.find(m, n, 30, tol)->success_rate);
        }
      }
    }
  }
}

TEST_CASE("default_workers honours CC_IK_THREADS") {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  ::setenv("CC_IK_THREADS", "3", 1);
  CHECK(default_workers() == std::min(3u, hw));
  ::setenv("CC_IK_THREADS", "1", 1);
  CHECK(default_workers() == 1);
  ::setenv("CC_IK_THREADS", "0", 1);
  CHECK(default_workers() >= 1);
  ::setenv("CC_IK_THREADS", "junk", 1);
  CHECK(default_workers() >= 1);
  ::unsetenv("CC_IK_THREADS");
  CHECK(default_workers() >= 1);
}

TEST_CASE("aggregate") {
  std::vector<TrialRecord> records;
  for (int k = 0; k < 10; ++k) records.push_back(record(Method::Jacobian, k, k < 7, 10 + k, k == 9));

  const BenchmarkSummary s = aggregate(records);
  REQUIRE(s.cells.size() == 1);
  const SummaryCell& c = s.cells[0];
  CHECK(c.trial_count == 10);
  CHECK(c.converged_count == 7);
  CHECK(c.success_rate == 0.7);
  CHECK(*c.mean_iter_converged == doctest::Approx(13.0));
  CHECK(c.deadlock_rate == doctest::Approx(0.1));

  SUBCASE("permutation invariant") {
    auto shuffled = records;
    std::mt19937_64 rng(5);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const SummaryCell& d = aggregate(shuffled).cells[0];
    CHECK(d.success_rate == c.success_rate);
    CHECK(d.mean_iter_converged == c.mean_iter_converged);
    CHECK(d.mean_iter_paired == c.mean_iter_paired);
  }

  SUBCASE("all failed leaves the means absent") {
    std::vector<TrialRecord> failed;
    for (int k = 0; k < 4; ++k) failed.push_back(record(Method::Vvl, k, false, 500));
    const SummaryCell& d = aggregate(failed).cells[0];
    CHECK(d.success_rate == 0.0);
    CHECK_FALSE(d.mean_iter_converged.has_value());
    CHECK_FALSE(d.mean_iter_paired.has_value());
  }

  SUBCASE("paired means use trials every method solved") {
    std::vector<TrialRecord> mixed;
    mixed.push_back(record(Method::Jacobian, 0, true, 40));
    mixed.push_back(record(Method::Jacobian, 1, true, 10));
    mixed.push_back(record(Method::Vvl, 0, true, 20));
    mixed.push_back(record(Method::Vvl, 1, false, 500));
    const BenchmarkSummary p = aggregate(mixed);
    CHECK(*p.find(Method::Jacobian, 3, 500, 1e-4)->mean_iter_converged == doctest::Approx(25.0));
    CHECK(*p.find(Method::Jacobian, 3, 500, 1e-4)->mean_iter_paired == doctest::Approx(40.0));
    CHECK(*p.find(Method::Vvl, 3, 500, 1e-4)->mean_iter_paired == doctest::Approx(20.0));
    CHECK(*paired_mean_iterations(mixed, Method::Vvl, {Method::Jacobian, Method::Vvl}, 3, 500, 1e-4) ==
          doctest::Approx(20.0));
    CHECK_FALSE(paired_mean_iterations(mixed, Method::Vvl, {Method::Vvl}, 4, 500, 1e-4).has_value());
  }

  SUBCASE("empty input") {
    CHECK_THROWS_AS(aggregate(std::vector<TrialRecord>{}), std::invalid_argument);
    const BenchmarkSpec spec = tiny({Method::Jacobian, Method::Dls}, {3}, 10);
    const BenchmarkSummary full = aggregate(records, spec);
    REQUIRE(full.cells.size() == 2);
    const SummaryCell* missing = full.find(Method::Dls, 3, 500, 1e-4);
    REQUIRE(missing != nullptr);
    CHECK(missing->empty);
    CHECK(missing->trial_count == 0);
    CHECK(missing->success_rate == 0.0);
  }
}

TEST_CASE("sample_workspace") {
  BenchmarkSpec spec;
  for (int n = 1; n <= 7; ++n) {
    const auto pts = sample_workspace(17, n, 500, spec);
    CHECK(pts.size() == 500);
    for (const auto& p : pts) {
      CHECK(p.tip.norm() <= n * spec.nominal_length + 1e-9);
      CHECK(forward_kinematics(p.configuration).p == p.tip);
    }
  }
  const auto a = sample_workspace(3, 2, 50, spec);
  const auto b = sample_workspace(3, 2, 50, spec);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].tip == b[i].tip);

  spec.theta_max = 1e-9;
  for (const auto& p : sample_workspace(4, 1, 100, spec)) {
    CHECK((p.tip - Eigen::Vector3d(0, 0, 1)).norm() <= 1e-8);
  }
  CHECK_THROWS_AS(sample_workspace(1, 2, 0, spec), std::invalid_argument);
}
