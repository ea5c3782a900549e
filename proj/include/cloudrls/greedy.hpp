#pragma once

#include "cloudrls/parallel.hpp"
#include "cloudrls/types.hpp"

#include <vector>

namespace cloudrls {

/// All-agent data stacked for the centralized estimator, agent order 1..N:
/// y_check in R^(N n_y), X_check in R^(n_theta x N n_y).
struct LumpedSample {
  Vector y;
  Matrix X;
};

LumpedSample lump_samples(const std::vector<Sample>& samples);

/// Centralized RLS over the lumped vectors:
///   K = phi X (lambda I + X' phi X)^-1,
///   phi <- (I - K X') phi / lambda,
///   theta <- theta + K (y - X' theta).
/// state.lambda = 1 gives the plain centralized recursion; a smaller value
/// adds exponential forgetting for time-varying runs.
RlsState centralized_rls_step(const RlsState& state, const LumpedSample& lumped);

/// Plain mean of the local estimates.
Vector s_rls_global(const std::vector<Vector>& locals);

/// Precision-weighted mean (sum phi_n^-1)^-1 (sum phi_n^-1 theta_n).
/// Throws NumericalError naming the agent whose phi is not invertible.
Vector sw_rls_global(const std::vector<Vector>& locals, const std::vector<Matrix>& phis);

struct MixedStepResult {
  std::vector<RlsState> agents;
  Vector theta_g;
};

/// One mixed step: every agent's prior is overwritten with theta_g_prev
/// before its classical RLS update, then the fresh locals are recombined
/// (plain mean, or precision-weighted when `weighted` is set).
MixedStepResult mixed_step(std::vector<RlsState> agents, const Vector& theta_g_prev,
                           const std::vector<Sample>& samples, bool weighted,
                           ExecPolicy policy = ExecPolicy::Serial);

}  // namespace cloudrls
