#pragma once

// Shared helpers for the test suites: a minimal two-time-scale driver built
// from the library's own operations (the thing the oracle is compared
// against), plus small matrix utilities.

#include "cloudrls/admm.hpp"
#include "cloudrls/estimation.hpp"
#include "cloudrls/types.hpp"

#include "oracles.hpp"

#include <vector>

namespace cloudrls::testing {

struct LibraryRun {
  Matrix theta_g;
  std::vector<Matrix> fused;
  std::vector<Matrix> rls;
  std::vector<Matrix> duals;
  std::vector<int> iterations;
};

/// Runs the recursive pipeline (extended samples, gain recursions, local
/// updates, cloud loop) over an OracleProblem's raw streams.
inline LibraryRun drive_library(const OracleProblem& p, ExecPolicy policy = ExecPolicy::Serial) {
  const int N = p.num_agents();
  const int T = p.horizon();

  std::vector<RlsState> agents(static_cast<size_t>(N));
  for (int n = 0; n < N; ++n) {
    auto& a = agents[static_cast<size_t>(n)];
    a.theta = p.theta0[static_cast<size_t>(n)];
    a.phi = p.initial_phi(n);
    a.lambda = p.lambdas[static_cast<size_t>(n)];
  }
  CloudState cloud = CloudState::init(p.mode, p.penalties, p.lambdas, p.theta_g0, p.theta0);
  std::vector<Vector> feedback = p.theta0;

  LibraryRun run;
  run.theta_g.resize(p.mode.n_g(), T);
  run.fused.assign(static_cast<size_t>(N), Matrix(p.mode.n_theta(), T));
  run.rls.assign(static_cast<size_t>(N), Matrix(p.mode.n_theta(), T));
  run.duals.assign(static_cast<size_t>(N), Matrix(p.mode.n_g(), T));
  run.iterations.resize(static_cast<size_t>(T));

  std::vector<AgentPayload> payloads(static_cast<size_t>(N));
  for (int t = 1; t <= T; ++t) {
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      const Sample& s = p.samples[idx][static_cast<size_t>(t - 1)];
      const ExtendedSample ext =
          extend_sample(s, p.mode, p.lambdas[idx], p.penalties);
      GainUpdate gain = gain_update(agents[idx], ext);
      agents[idx].phi = gain.phi_new;
      agents[idx].theta = local_rls_update(gain.K, ext, feedback[idx]);
      payloads[idx] = {agents[idx].theta, agents[idx].phi};
      run.rls[idx].col(t - 1) = agents[idx].theta;
    }
    const CloudStepResult step = cloud_iterate(cloud, payloads, p.settings, policy);
    run.theta_g.col(t - 1) = step.global;
    run.iterations[static_cast<size_t>(t - 1)] = step.iterations;
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      feedback[idx] = step.fused[idx];
      run.fused[idx].col(t - 1) = step.fused[idx];
      run.duals[idx].col(t - 1) = cloud.prev_duals[idx];
    }
  }
  return run;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Matrix random_spd(Rng& rng, int d) {
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = rng.normal(0.0, 1.0);
  return A * A.transpose() + 0.1 * Matrix::Identity(d, d);
}

}  // namespace cloudrls::testing
