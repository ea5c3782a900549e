#pragma once

#include "cloudrls/parallel.hpp"
#include "cloudrls/types.hpp"

#include <vector>

namespace cloudrls {

/// Inner-loop controls for the cloud iteration. The loop stops after
/// max_iters iterations or as soon as the primal residual
/// max_n ||P theta_n - theta_g||_2 drops to primal_tol.
struct AdmmSettings {
  int max_iters = 50;
  double primal_tol = 1e-8;

  void validate() const {
    if (max_iters < 1) throw ConfigError("AdmmSettings: max_iters must be >= 1");
    if (primal_tol < 0) throw ConfigError("AdmmSettings: primal_tol must be >= 0");
  }
};

/// Cloud-side state for the consensus iteration. `global`, `duals`,
/// `duals_box` and `z` are the current inner-loop iterates; the `prev_*`
/// fields snapshot the iterate that produced the fused estimates returned at
/// the previous time step, and stay frozen while the inner loop runs. The
/// box duals and z exist only in the constrained variant. Dual vector
/// lengths: `duals` n_g (consensus), `duals_box` n_theta (box coupling).
struct CloudState {
  ConsensusMode mode = ConsensusMode::full(1);
  Penalties penalties;
  std::vector<double> lambdas;  // per-agent forgetting factors

  Vector global;                  // n_g
  std::vector<Vector> duals;      // N x n_g
  std::vector<Vector> duals_box;  // N x n_theta (constrained only)
  std::vector<Vector> z;          // N x n_theta (constrained only)

  Vector prev_global;
  std::vector<Vector> prev_duals;
  std::vector<Vector> prev_duals_box;
  std::vector<Vector> prev_z;

  int iteration = 0;  // inner iterations executed at the last time step

  int num_agents() const { return static_cast<int>(duals.size()); }

  /// Initial cloud state: duals at zero, z at the box projection of each
  /// initial local estimate, and the prev snapshot primed with these values
  /// so the first time step warm-starts from them.
  static CloudState init(ConsensusMode mode, Penalties penalties, std::vector<double> lambdas,
                         const Vector& theta_g0, const std::vector<Vector>& theta0);
};

/// Euclidean projection onto [lo, hi], elementwise. Idempotent.
Vector project_box(const Vector& v, const Vector& lo, const Vector& hi);

/// Cloud-side correction for agent n at the current inner iterate, built
/// from differences against the previous step's snapshot:
///   full:        phi (rho Dg - Dd)
///   partial:     phi P' (rho Dg - Dd)
///   constrained: phi (rho1 Dz + rho2 P' Dg - Dd1 - P' Dd2)
/// where Dg = global - lambda_n prev_global, and likewise for the other
/// iterates. phi is the agent's current covariance-style matrix.
Vector admm_correction(const Matrix& phi, const CloudState& cloud, int n);

/// theta_n = theta_rls + theta_admm.
inline Vector fuse_local(const Vector& theta_rls, const Vector& theta_admm) {
  return theta_rls + theta_admm;
}

/// Mean over agents of (P theta_n + duals_n / rho), accumulated in fixed
/// agent order. P is the identity in the full variant.
Vector global_update(const std::vector<Vector>& locals, const std::vector<Vector>& duals,
                     double rho, const ConsensusMode& mode);

/// Ascent step on the consensus multipliers: duals_n + rho (P theta_n - g).
std::vector<Vector> dual_update(const std::vector<Vector>& duals,
                                const std::vector<Vector>& locals, const Vector& global,
                                double rho, const ConsensusMode& mode);

/// Ascent step on the box multipliers: duals_n + rho1 (theta_n - z_n).
std::vector<Vector> dual_update_box(const std::vector<Vector>& duals,
                                    const std::vector<Vector>& locals,
                                    const std::vector<Vector>& z, double rho1);

/// What each node uploads once per time step.
struct AgentPayload {
  Vector theta_rls;
  Matrix phi;
};

struct CloudStepResult {
  std::vector<Vector> fused;  // per-agent estimates sent back to the nodes
  Vector global;              // latest global iterate (reported trajectory value)
  int iterations = 0;
  double primal_residual = 0.0;  // max_n ||P theta_n - global|| at exit
  double global_change = 0.0;    // ||g_(k+1) - g_(k)|| at exit
  bool converged = false;        // stopped on the residual test
};

/// Runs the inner consensus loop for one time step, all agent payloads
/// present (synchronous barrier). Per iteration: correction + fuse for every
/// agent, box projection of z (constrained), global update, dual update(s);
/// repeat until the stopping rule fires. On exit the prev snapshot becomes
/// the iterate that produced the returned fused estimates, so the next
/// step's recursive update continues the exact same trajectory the
/// from-scratch solution would take.
CloudStepResult cloud_iterate(CloudState& cloud, const std::vector<AgentPayload>& payloads,
                              const AdmmSettings& settings,
                              ExecPolicy policy = ExecPolicy::Serial);

}  // namespace cloudrls
