#include "cloudrls/admm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cloudrls {

CloudState CloudState::init(ConsensusMode mode, Penalties penalties,
                            std::vector<double> lambdas, const Vector& theta_g0,
                            const std::vector<Vector>& theta0) {
  penalties.validate(mode);
  const int N = static_cast<int>(theta0.size());
  if (static_cast<int>(lambdas.size()) != N)
    throw ConfigError("CloudState: one forgetting factor per agent required");
  if (theta_g0.size() != mode.n_g())
    throw ConfigError("CloudState: initial global estimate must have length n_g");
  if (mode.is_constrained() && static_cast<int>(mode.boxes().size()) != N)
    throw ConfigError("CloudState: constrained mode needs one box per agent");

  CloudState c;
  c.mode = std::move(mode);
  c.penalties = penalties;
  c.lambdas = std::move(lambdas);
  c.global = theta_g0;
  c.duals.assign(theta0.size(), Vector::Zero(c.mode.n_g()));
  if (c.mode.is_constrained()) {
    c.duals_box.assign(theta0.size(), Vector::Zero(c.mode.n_theta()));
    c.z.resize(theta0.size());
    for (int n = 0; n < N; ++n) {
      const auto& box = c.mode.box(n);
      c.z[static_cast<size_t>(n)] = project_box(theta0[static_cast<size_t>(n)], box.lo, box.hi);
    }
  }
  c.prev_global = c.global;
  c.prev_duals = c.duals;
  c.prev_duals_box = c.duals_box;
  c.prev_z = c.z;
  return c;
}

Vector project_box(const Vector& v, const Vector& lo, const Vector& hi) {
  BoxConstraint{lo, hi}.validate();
  if (v.size() != lo.size()) throw ConfigError("project_box: dimension mismatch");
  return v.cwiseMax(lo).cwiseMin(hi);
}

Vector admm_correction(const Matrix& phi, const CloudState& cloud, int n) {
  const auto idx = static_cast<size_t>(n);
  const double lambda = cloud.lambdas[idx];
  const double rho = cloud.penalties.consensus_weight(cloud.mode);
  const Vector dg = cloud.global - lambda * cloud.prev_global;
  const Vector dd = cloud.duals[idx] - lambda * cloud.prev_duals[idx];
  switch (cloud.mode.variant()) {
    case ConsensusVariant::Full:
      return phi * (rho * dg - dd);
    case ConsensusVariant::Partial:
      return phi * (cloud.mode.P().transpose() * (rho * dg - dd));
    case ConsensusVariant::ConstrainedPartial: {
      const Vector dz = cloud.z[idx] - lambda * cloud.prev_z[idx];
      const Vector dd1 = cloud.duals_box[idx] - lambda * cloud.prev_duals_box[idx];
      return phi * (cloud.penalties.rho1 * dz - dd1 +
                    cloud.mode.P().transpose() * (rho * dg - dd));
    }
  }
  throw ConfigError("admm_correction: unknown consensus variant");
}

Vector global_update(const std::vector<Vector>& locals, const std::vector<Vector>& duals,
                     double rho, const ConsensusMode& mode) {
  if (locals.empty()) throw ConfigError("global_update: no agents");
  if (locals.size() != duals.size())
    throw ConfigError("global_update: locals/duals size mismatch");
  Vector sum = Vector::Zero(mode.n_g());
  for (size_t n = 0; n < locals.size(); ++n) {
    if (mode.is_full())
      sum += locals[n];
    else
      sum.noalias() += mode.P() * locals[n];
    sum += duals[n] / rho;
  }
  return sum / static_cast<double>(locals.size());
}

std::vector<Vector> dual_update(const std::vector<Vector>& duals,
                                const std::vector<Vector>& locals, const Vector& global,
                                double rho, const ConsensusMode& mode) {
  std::vector<Vector> out(duals.size());
  for (size_t n = 0; n < duals.size(); ++n) {
    if (mode.is_full())
      out[n] = duals[n] + rho * (locals[n] - global);
    else
      out[n] = duals[n] + rho * (mode.P() * locals[n] - global);
  }
  return out;
}

std::vector<Vector> dual_update_box(const std::vector<Vector>& duals,
                                    const std::vector<Vector>& locals,
                                    const std::vector<Vector>& z, double rho1) {
  std::vector<Vector> out(duals.size());
  for (size_t n = 0; n < duals.size(); ++n) out[n] = duals[n] + rho1 * (locals[n] - z[n]);
  return out;
}

CloudStepResult cloud_iterate(CloudState& cloud, const std::vector<AgentPayload>& payloads,
                              const AdmmSettings& settings, ExecPolicy policy) {
  settings.validate();
  const int N = cloud.num_agents();
  if (static_cast<int>(payloads.size()) != N)
    throw ConfigError("cloud_iterate: expected " + std::to_string(N) + " payloads, got " +
                      std::to_string(payloads.size()));
  const bool constrained = cloud.mode.is_constrained();
  const bool full = cloud.mode.is_full();
  const double rho = cloud.penalties.consensus_weight(cloud.mode);
  const int n_g = cloud.mode.n_g();
  const int n_theta = cloud.mode.n_theta();
  const Matrix& P = cloud.mode.P();

  // The per-agent work inside one inner iteration is a handful of small
  // matrix-vector products; forking a thread team every iteration only pays
  // off for wide fleets.
  if (N < 2048) policy = ExecPolicy::Serial;

  // Warm start from the previous step's snapshot.
  cloud.global = cloud.prev_global;
  cloud.duals = cloud.prev_duals;
  cloud.duals_box = cloud.prev_duals_box;
  cloud.z = cloud.prev_z;

  // Per-agent phi P' is fixed within the step; hoist it out of the loop.
  std::vector<Matrix> phiPt;
  if (!full) {
    phiPt.resize(static_cast<size_t>(N));
    for_each_agent(N, policy, [&](int n) {
      phiPt[static_cast<size_t>(n)].noalias() = payloads[static_cast<size_t>(n)].phi * P.transpose();
    });
  }

  CloudStepResult res;
  res.fused.assign(static_cast<size_t>(N), Vector::Zero(n_theta));

  // Column-per-agent workspaces keep the parallel loop allocation-free.
  Matrix work_g(n_g, N);
  Matrix work_t(n_theta, N);
  Vector sum(n_g), new_global(n_g), pf(n_g);

  Vector snap_global;
  std::vector<Vector> snap_duals, snap_duals_box, snap_z;

  for (int k = 0; k < settings.max_iters; ++k) {
    for_each_agent(N, policy, [&](int n) {
      const auto idx = static_cast<size_t>(n);
      const double lambda = cloud.lambdas[idx];
      auto w = work_g.col(n);
      w = rho * (cloud.global - lambda * cloud.prev_global);
      w -= cloud.duals[idx] - lambda * cloud.prev_duals[idx];
      res.fused[idx] = payloads[idx].theta_rls;
      if (constrained) {
        auto v = work_t.col(n);
        v = cloud.penalties.rho1 * (cloud.z[idx] - lambda * cloud.prev_z[idx]);
        v -= cloud.duals_box[idx] - lambda * cloud.prev_duals_box[idx];
        res.fused[idx].noalias() += payloads[idx].phi * v;
      }
      if (full)
        res.fused[idx].noalias() += payloads[idx].phi * w;
      else
        res.fused[idx].noalias() += phiPt[idx] * w;
    });

    // The iterate that produced these estimates; committed as the prev
    // snapshot when the loop exits.
    snap_global = cloud.global;
    snap_duals = cloud.duals;
    snap_duals_box = cloud.duals_box;
    snap_z = cloud.z;

    if (constrained) {
      for_each_agent(N, policy, [&](int n) {
        const auto idx = static_cast<size_t>(n);
        const auto& box = cloud.mode.box(n);
        cloud.z[idx] = (res.fused[idx] + cloud.duals_box[idx] / cloud.penalties.rho1)
                           .cwiseMax(box.lo)
                           .cwiseMin(box.hi);
      });
    }

    // Global mean and dual ascent, fixed agent order.
    sum.setZero();
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      if (full)
        sum += res.fused[idx];
      else
        sum.noalias() += P * res.fused[idx];
      sum += cloud.duals[idx] / rho;
    }
    new_global = sum / static_cast<double>(N);

    if (constrained) {
      for (int n = 0; n < N; ++n) {
        const auto idx = static_cast<size_t>(n);
        cloud.duals_box[idx] += cloud.penalties.rho1 * (res.fused[idx] - cloud.z[idx]);
      }
    }
    double residual = 0.0;
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      if (full)
        pf = res.fused[idx];
      else
        pf.noalias() = P * res.fused[idx];
      cloud.duals[idx] += rho * (pf - new_global);
      residual = std::max(residual, (pf - new_global).norm());
    }

    res.global_change = (new_global - cloud.global).norm();
    cloud.global = new_global;
    res.primal_residual = residual;
    res.iterations = k + 1;
    if (residual <= settings.primal_tol) {
      res.converged = true;
      break;
    }
  }

  cloud.prev_global = std::move(snap_global);
  cloud.prev_duals = std::move(snap_duals);
  cloud.prev_duals_box = std::move(snap_duals_box);
  cloud.prev_z = std::move(snap_z);
  cloud.iteration = res.iterations;
  res.global = cloud.global;
  return res;
}

}  // namespace cloudrls
