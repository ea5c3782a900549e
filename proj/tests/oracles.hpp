#pragma once

// Independent reference computations for the test suites. Everything here
// evaluates the estimation problem directly from the raw data — matrices are
// assembled by explicit summation and inverted with dense solves, and the
// cloud loop is replicated with per-iteration closed-form estimates — so none
// of the library's recursive shortcuts are on the code path being checked.

#include "cloudrls/admm.hpp"
#include "cloudrls/rng.hpp"
#include "cloudrls/types.hpp"

#include <optional>
#include <vector>

namespace cloudrls::testing {

struct OracleProblem {
  ConsensusMode mode = ConsensusMode::full(1);
  Penalties penalties;
  std::vector<double> lambdas;                // per agent
  double gamma = 0.1;                          // phi(0) = gamma I unless phi0 set
  std::optional<std::vector<Matrix>> phi0;     // explicit per-agent phi(0)
  std::vector<std::vector<Sample>> samples;    // [agent][t-1]
  std::vector<Vector> theta0;                  // initial local estimates
  Vector theta_g0;                             // initial global estimate
  AdmmSettings settings;

  int num_agents() const { return static_cast<int>(samples.size()); }
  int horizon() const { return static_cast<int>(samples.front().size()); }
  Matrix initial_phi(int n) const;
};

/// The mode's constant penalty block: rho I, rho P'P, or rho1 I + rho2 P'P.
Matrix penalty_block(const ConsensusMode& mode, const Penalties& penalties);

/// Direct evaluation of the covariance-style matrix after t steps, including
/// the decayed initial condition:
///   ( lambda^t phi(0)^-1 + sum_{tau=1..t} lambda^{t-tau} X X'
///     + (1 - lambda^t) B )^-1.
Matrix direct_phi(const OracleProblem& p, int agent, int t);

/// Direct evaluation of the accumulated data term with its initial-condition
/// carry: sum lambda^{t-tau} X y + lambda^t (phi(0)^-1 theta0 - c0), where c0
/// combines the initial cloud values exactly as the first correction does.
Vector direct_data_term(const OracleProblem& p, int agent, int t);

struct OracleRun {
  Matrix theta_g;                 // n_g x T
  std::vector<Matrix> fused;      // per agent, n_theta x T
  std::vector<Matrix> duals;      // per agent, n_g x T (snapshot values)
  std::vector<int> iterations;    // per step
};

/// Replicates the two-time-scale run with fused estimates computed from
/// direct_phi/direct_data_term at every inner iteration (no recursions, no
/// gain identity, no RLS/correction split).
OracleRun reference_run(const OracleProblem& p);

/// Random small instance for property tests: raw Gaussian streams, not ARX.
OracleProblem random_problem(Rng& rng, ConsensusVariant variant, int max_agents = 3,
                             int max_horizon = 8, int max_theta = 3, int n_y = 1);

/// Ordinary (prior-regularized) weighted least squares solved by normal
/// equations: argmin_theta  sum_t lambda^{T-t} ||y - X' theta||^2
///                          + lambda^T (theta - theta0)' phi0^-1 (theta - theta0).
Vector normal_equations_fit(const std::vector<Sample>& samples, double lambda,
                            const Matrix& phi0, const Vector& theta0);

}  // namespace cloudrls::testing
