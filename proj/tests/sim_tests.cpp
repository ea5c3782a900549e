#include "cloudrls/metrics.hpp"
#include "cloudrls/simulation.hpp"

#include "test_utils.hpp"

#include <doctest.h>

#include <set>

using namespace cloudrls;
using namespace cloudrls::testing;

namespace {

ScenarioConfig tiny_example1(int N, int T) {
  ScenarioConfig cfg = load_preset("example1");
  cfg.num_agents = N;
  cfg.horizon = T;
  cfg.admm.max_iters = 20;
  return cfg;
}

bool identical(const RunResult& a, const RunResult& b) {
  if (a.theta_g != b.theta_g) return false;
  for (size_t n = 0; n < a.fused.size(); ++n) {
    if (a.fused[n] != b.fused[n]) return false;
    if (a.rls[n] != b.rls[n]) return false;
  }
  for (size_t n = 0; n < a.duals.size(); ++n)
    if (a.duals[n] != b.duals[n]) return false;
  return a.log.node_to_cloud == b.log.node_to_cloud &&
         a.log.cloud_to_node == b.log.cloud_to_node;
}

}  // namespace

TEST_CASE("single agent single step exchanges exactly one message each way") {
  const ScenarioConfig cfg = tiny_example1(1, 1);
  const RunResult run = run_simulation(cfg, Estimator::AdmmRls);
  CHECK(run.log.node_to_cloud == 1);
  CHECK(run.log.cloud_to_node == 1);
  CHECK(run.log.rls_updates == 1);
  // upload carries the estimate and its matrix, download just the estimate
  CHECK(run.log.node_to_cloud_elements == 2 + 4);
  CHECK(run.log.cloud_to_node_elements == 2);
}

TEST_CASE("message counts are N*T in both directions for the consensus run") {
  const ScenarioConfig cfg = tiny_example1(7, 13);
  const RunResult run = run_simulation(cfg, Estimator::AdmmRls);
  CHECK(run.log.node_to_cloud == 7 * 13);
  CHECK(run.log.cloud_to_node == 7 * 13);
  CHECK(run.log.rls_updates == 7 * 13);
}

TEST_CASE("local recursions run once per agent per step regardless of the inner loop") {
  ScenarioConfig cfg = tiny_example1(4, 9);
  cfg.admm.max_iters = 1;
  const RunResult one = run_simulation(cfg, Estimator::AdmmRls);
  cfg.admm.max_iters = 37;
  const RunResult many = run_simulation(cfg, Estimator::AdmmRls);
  CHECK(one.log.rls_updates == 4 * 9);
  CHECK(many.log.rls_updates == 4 * 9);
}

TEST_CASE("greedy uploads differ by variant and mixed variants broadcast back") {
  const ScenarioConfig cfg = tiny_example1(5, 8);
  const long N = 5, T = 8;

  const RunResult s = run_simulation(cfg, Estimator::SRls);
  CHECK(s.log.node_to_cloud == N * T);
  CHECK(s.log.cloud_to_node == 0);
  CHECK(s.log.node_to_cloud_elements == N * T * 2);  // estimate only

  const RunResult sw = run_simulation(cfg, Estimator::SwRls);
  CHECK(sw.log.node_to_cloud_elements == N * T * (2 + 4));  // estimate and matrix

  const RunResult m = run_simulation(cfg, Estimator::MRls);
  CHECK(m.log.cloud_to_node == N * T);  // global estimate fed back each step

  const RunResult c = run_simulation(cfg, Estimator::CRls);
  CHECK(c.log.node_to_cloud == N * T);  // raw data pairs
  CHECK(c.log.cloud_to_node == 0);
  CHECK(c.log.node_to_cloud_elements == N * T * (1 + 2));
}

TEST_CASE("phase ordering: all uploads for t precede downloads for t") {
  ScenarioConfig cfg = tiny_example1(3, 4);
  SimulationOptions opt;
  opt.record_events = true;
  const RunResult run = run_simulation(cfg, Estimator::AdmmRls, opt);
  REQUIRE(run.log.events.size() == static_cast<size_t>(2 * 3 * 4));
  int prev_t = 1;
  std::set<int> uploads, downloads;
  for (const auto& ev : run.log.events) {
    CHECK(ev.t >= prev_t);
    if (ev.t > prev_t) {
      // step boundary: the previous step must have completed both phases
      CHECK(uploads.size() == 3);
      CHECK(downloads.size() == 3);
      uploads.clear();
      downloads.clear();
      prev_t = ev.t;
    }
    if (ev.to_cloud) {
      CHECK(downloads.empty());  // no download before every upload arrived
      uploads.insert(ev.agent_id);
    } else {
      CHECK(uploads.size() == 3);
      downloads.insert(ev.agent_id);
    }
  }
}

TEST_CASE("same seed reproduces bitwise-identical runs") {
  const ScenarioConfig cfg = tiny_example1(6, 25);
  for (Estimator est : {Estimator::AdmmRls, Estimator::SwRls, Estimator::CRls}) {
    const RunResult a = run_simulation(cfg, est);
    const RunResult b = run_simulation(cfg, est);
    CHECK(identical(a, b));
  }
}

TEST_CASE("every estimator consumes the same generated streams") {
  const ScenarioConfig cfg = tiny_example1(4, 10);
  const Dataset a = replay_inputs(cfg);
  const Dataset b = replay_inputs(cfg);
  for (int n = 0; n < cfg.num_agents; ++n) {
    CHECK(a.agents[static_cast<size_t>(n)].X == b.agents[static_cast<size_t>(n)].X);
    CHECK(a.agents[static_cast<size_t>(n)].y == b.agents[static_cast<size_t>(n)].y);
  }
}

TEST_CASE("baselines reject non-full consensus scenarios") {
  const ScenarioConfig cfg = load_preset("example3");
  CHECK_THROWS_AS(run_simulation(cfg, Estimator::SRls), ConfigError);
  CHECK_THROWS_AS(run_simulation(cfg, Estimator::CRls), ConfigError);
}

TEST_CASE("constrained runs record box duals and projected iterates") {
  ScenarioConfig cfg = load_preset("example4-S2");
  cfg.num_agents = 5;
  cfg.horizon = 20;
  cfg.admm.max_iters = 30;
  const Dataset data = generate(cfg);
  const RunResult run = run_simulation(cfg, Estimator::AdmmRls, {}, &data);
  REQUIRE(run.z.size() == 5);
  REQUIRE(run.duals_box.size() == 5);
  for (int n = 0; n < 5; ++n) {
    const auto& box = data.boxes[static_cast<size_t>(n)];
    const Matrix& z = run.z[static_cast<size_t>(n)];
    for (int t = 0; t < 20; ++t)
      for (int i = 0; i < 3; ++i) {
        CHECK(z(i, t) >= box.lo[i]);
        CHECK(z(i, t) <= box.hi[i]);
      }
  }
}

TEST_CASE("simulation runs attach context to numerical failures") {
  ScenarioConfig cfg = tiny_example1(2, 3);
  Dataset data = generate(cfg);
  // poison one regressor so the local recursion fails at agent 2, t = 2
  data.agents[1].X(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    run_simulation(cfg, Estimator::AdmmRls, {}, &data);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("agent 2") != std::string::npos);
    CHECK(msg.find("t=2") != std::string::npos);
  }
}
