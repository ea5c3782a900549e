#pragma once

#include "cloudrls/scenario.hpp"
#include "cloudrls/types.hpp"

#include <vector>

namespace cloudrls {

struct RunResult;  // simulation.hpp

/// 10 log10(sum (y - e)^2 / sum e^2) in dB; +infinity when the noise
/// energy is exactly zero.
double snr_db(const Eigen::RowVectorXd& outputs, const Eigen::RowVectorXd& noise);

/// Per-component sqrt(sum_t (truth - estimate)^2 / T) for aligned
/// trajectories stored one component per row.
Vector rmse_trajectory(const Matrix& truth, const Matrix& estimate);

/// Violation accounting for constrained runs: a step counts when the
/// estimate leaves the widened box [lo - tol, hi + tol].
struct ViolationStats {
  Matrix counts;   // num_agents x n_theta
  Vector avg_pct;  // per component, averaged over agents, in percent of T
  double overall_avg_pct = 0.0;
};

ViolationStats count_violations(const std::vector<Matrix>& locals,
                                const std::vector<BoxConstraint>& boxes, int horizon,
                                double tol = 1e-4);

struct Metrics {
  Vector rmse_global;           // per global component
  double rmse_global_norm = 0;  // Euclidean norm of the above
  Matrix rmse_local;            // num_agents x n_theta; empty when no local estimates
  std::vector<double> snr_db;   // per agent
  ViolationStats violations;    // populated only for constrained runs
  double avg_admm_iterations = 0.0;
};

Metrics compute_metrics(const RunResult& run, const Dataset& data);

}  // namespace cloudrls
