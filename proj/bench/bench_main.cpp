// Timing harness comparing the serial reference loops against the
// OpenMP-parallel kernels: the per-agent local estimation phase and the
// cloud's inner consensus iteration, plus a full simulation at each policy.
//
//   cloudrls_bench [repeats]

#include "cloudrls/admm.hpp"
#include "cloudrls/estimation.hpp"
#include "cloudrls/parallel.hpp"
#include "cloudrls/rng.hpp"
#include "cloudrls/scenario.hpp"
#include "cloudrls/simulation.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

using namespace cloudrls;

namespace {

double time_best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs < best) best = secs;
  }
  return best;
}

void report(const char* name, int agents, double serial, double parallel) {
  std::printf("%-28s N=%-6d serial %9.4fs  openmp %9.4fs  speedup %5.2fx\n", name, agents,
              serial, parallel, serial / parallel);
}

// One local phase: extended sample, gain recursion and local update per agent.
void bench_local_phase(int repeats, int N, int steps) {
  Rng rng(99);
  const int d = 8;  // wider model so each agent does real work
  ArxModelSpec model{4, 4, 0, 1, 1};
  const ConsensusMode mode = ConsensusMode::full(d);
  Penalties pen;
  pen.rho = 0.1;

  std::vector<Sample> samples(static_cast<size_t>(N));
  for (auto& s : samples) {
    s.t = 1;
    s.X.resize(d, 1);
    for (int i = 0; i < d; ++i) s.X(i, 0) = rng.normal(0.0, 1.0);
    s.y = Vector::Constant(1, rng.normal(0.0, 1.0));
  }

  const auto run_phase = [&](ExecPolicy policy) {
    std::vector<RlsState> agents(static_cast<size_t>(N),
                                 RlsState::init(Vector::Zero(d), 0.1, 0.99));
    for (int t = 0; t < steps; ++t) {
      for_each_agent(N, policy, [&](int n) {
        const auto idx = static_cast<size_t>(n);
        const ExtendedSample ext = extend_sample(samples[idx], mode, 0.99, pen);
        GainUpdate g = gain_update(agents[idx], ext);
        agents[idx].phi = std::move(g.phi_new);
        agents[idx].theta = local_rls_update(g.K, ext, agents[idx].theta);
      });
    }
  };
  const double serial = time_best_of(repeats, [&] { run_phase(ExecPolicy::Serial); });
  const double parallel = time_best_of(repeats, [&] { run_phase(ExecPolicy::Parallel); });
  report("local phase (n_theta=8)", N, serial, parallel);
}

// The cloud's inner loop on a wide fleet (the parallel path engages above
// 512 agents; below that the library runs it serially by design).
void bench_cloud_iterate(int repeats, int N, int iters) {
  Rng rng(101);
  const int d = 8;
  const ConsensusMode mode = ConsensusMode::full(d);
  Penalties pen;
  pen.rho = 0.1;
  std::vector<double> lambdas(static_cast<size_t>(N), 0.99);
  std::vector<Vector> theta0(static_cast<size_t>(N), Vector::Zero(d));
  std::vector<AgentPayload> payloads(static_cast<size_t>(N));
  for (auto& p : payloads) {
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = rng.normal(0.0, 1.0);
    p.phi = 0.01 * (A * A.transpose() + Matrix::Identity(d, d));
    p.theta_rls = Vector::Zero(d);
    for (int i = 0; i < d; ++i) p.theta_rls[i] = rng.normal(0.0, 1.0);
  }
  AdmmSettings settings;
  settings.max_iters = iters;
  settings.primal_tol = 0.0;

  const auto run_cloud = [&](ExecPolicy policy) {
    CloudState cloud = CloudState::init(mode, pen, lambdas, Vector::Zero(d), theta0);
    cloud_iterate(cloud, payloads, settings, policy);
  };
  const double serial = time_best_of(repeats, [&] { run_cloud(ExecPolicy::Serial); });
  const double parallel = time_best_of(repeats, [&] { run_cloud(ExecPolicy::Parallel); });
  report("cloud loop (200 iters)", N, serial, parallel);
}

void bench_full_run(int repeats, int N, int T) {
  ScenarioConfig cfg = load_preset("example1");
  cfg.num_agents = N;
  cfg.horizon = T;
  const Dataset data = generate(cfg);
  SimulationOptions serial_opt;
  serial_opt.policy = ExecPolicy::Serial;
  SimulationOptions parallel_opt;
  parallel_opt.policy = ExecPolicy::Parallel;
  const double serial = time_best_of(
      repeats, [&] { run_simulation(cfg, Estimator::AdmmRls, serial_opt, &data); });
  const double parallel = time_best_of(
      repeats, [&] { run_simulation(cfg, Estimator::AdmmRls, parallel_opt, &data); });
  report("full consensus run", N, serial, parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads available: %d, best of %d repeats\n", max_threads(), repeats);

  bench_local_phase(repeats, 100, 200);
  bench_local_phase(repeats, 1000, 50);
  bench_local_phase(repeats, 5000, 20);
  bench_cloud_iterate(repeats, 100, 200);
  bench_cloud_iterate(repeats, 2000, 200);
  bench_cloud_iterate(repeats, 10000, 200);
  bench_full_run(repeats, 100, 300);
  bench_full_run(repeats, 2000, 50);
  return 0;
}
