#include "cloudrls/metrics.hpp"

#include "cloudrls/simulation.hpp"

#include <cmath>
#include <limits>

namespace cloudrls {

double snr_db(const Eigen::RowVectorXd& outputs, const Eigen::RowVectorXd& noise) {
  if (outputs.size() != noise.size())
    throw ConfigError("snr_db: outputs and noise must have equal length");
  const double noise_energy = noise.squaredNorm();
  if (noise_energy == 0.0) return std::numeric_limits<double>::infinity();
  const double signal_energy = (outputs - noise).squaredNorm();
  return 10.0 * std::log10(signal_energy / noise_energy);
}

Vector rmse_trajectory(const Matrix& truth, const Matrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
    throw ConfigError("rmse_trajectory: trajectory shapes differ");
  const double T = static_cast<double>(truth.cols());
  return ((truth - estimate).array().square().rowwise().sum() / T).sqrt().matrix();
}

ViolationStats count_violations(const std::vector<Matrix>& locals,
                                const std::vector<BoxConstraint>& boxes, int horizon,
                                double tol) {
  if (locals.size() != boxes.size())
    throw ConfigError("count_violations: one box per agent required");
  ViolationStats stats;
  if (locals.empty()) return stats;
  const int N = static_cast<int>(locals.size());
  const int d = static_cast<int>(locals.front().rows());
  stats.counts = Matrix::Zero(N, d);
  for (int n = 0; n < N; ++n) {
    const auto& traj = locals[static_cast<size_t>(n)];
    const auto& box = boxes[static_cast<size_t>(n)];
    for (int i = 0; i < d; ++i) {
      const double lo = box.lo[i] - tol;
      const double hi = box.hi[i] + tol;
      long count = 0;
      for (Eigen::Index t = 0; t < traj.cols(); ++t) {
        const double v = traj(i, t);
        if (v < lo || v > hi) ++count;
      }
      stats.counts(n, i) = static_cast<double>(count);
    }
  }
  stats.avg_pct = 100.0 * stats.counts.colwise().mean() / static_cast<double>(horizon);
  stats.overall_avg_pct = stats.avg_pct.mean();
  return stats;
}

Metrics compute_metrics(const RunResult& run, const Dataset& data) {
  Metrics m;
  m.rmse_global = rmse_trajectory(data.truth_global, run.theta_g);
  m.rmse_global_norm = m.rmse_global.norm();

  if (!run.fused.empty()) {
    const int N = run.num_agents;
    m.rmse_local.resize(N, run.n_theta);
    for (int n = 0; n < N; ++n)
      m.rmse_local.row(n) =
          rmse_trajectory(data.agents[static_cast<size_t>(n)].truth,
                          run.fused[static_cast<size_t>(n)])
              .transpose();
  }

  m.snr_db.reserve(data.agents.size());
  for (const auto& agent : data.agents) m.snr_db.push_back(snr_db(agent.y, agent.e));

  if (!data.boxes.empty() && !run.fused.empty())
    m.violations = count_violations(run.fused, data.boxes, run.horizon);

  if (!run.admm_iterations.empty()) {
    double sum = 0;
    for (int it : run.admm_iterations) sum += it;
    m.avg_admm_iterations = sum / static_cast<double>(run.admm_iterations.size());
  }
  return m;
}

}  // namespace cloudrls
