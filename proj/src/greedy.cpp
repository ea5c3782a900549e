#include "cloudrls/greedy.hpp"

#include "cloudrls/estimation.hpp"

#include <string>
#include <utility>

namespace cloudrls {

LumpedSample lump_samples(const std::vector<Sample>& samples) {
  if (samples.empty()) throw ConfigError("lump_samples: no agents");
  const int n_theta = samples.front().n_theta();
  const int n_y = samples.front().n_y();
  const int N = static_cast<int>(samples.size());

  LumpedSample lumped;
  lumped.y.resize(static_cast<Eigen::Index>(N) * n_y);
  lumped.X.resize(n_theta, static_cast<Eigen::Index>(N) * n_y);
  for (int n = 0; n < N; ++n) {
    const auto& s = samples[static_cast<size_t>(n)];
    if (s.n_theta() != n_theta || s.n_y() != n_y)
      throw ConfigError("lump_samples: inconsistent sample dimensions at agent " +
                        std::to_string(n + 1));
    lumped.y.segment(static_cast<Eigen::Index>(n) * n_y, n_y) = s.y;
    lumped.X.middleCols(static_cast<Eigen::Index>(n) * n_y, n_y) = s.X;
  }
  return lumped;
}

RlsState centralized_rls_step(const RlsState& state, const LumpedSample& lumped) {
  const ExtendedSample ext{lumped.X, lumped.y};
  GainUpdate g = gain_update(state, ext);
  RlsState next = state;
  next.theta = local_rls_update(g.K, ext, state.theta);
  next.phi = std::move(g.phi_new);
  next.t = state.t + 1;
  return next;
}

Vector s_rls_global(const std::vector<Vector>& locals) {
  if (locals.empty()) throw ConfigError("s_rls_global: no agents");
  Vector sum = Vector::Zero(locals.front().size());
  for (const auto& theta : locals) sum += theta;
  return sum / static_cast<double>(locals.size());
}

Vector sw_rls_global(const std::vector<Vector>& locals, const std::vector<Matrix>& phis) {
  if (locals.empty()) throw ConfigError("sw_rls_global: no agents");
  if (locals.size() != phis.size())
    throw ConfigError("sw_rls_global: locals/phis size mismatch");
  const Eigen::Index d = locals.front().size();
  Matrix weight_sum = Matrix::Zero(d, d);
  Vector weighted = Vector::Zero(d);
  for (size_t n = 0; n < locals.size(); ++n) {
    Eigen::FullPivLU<Matrix> lu(phis[n]);
    if (!lu.isInvertible())
      throw NumericalError("sw_rls_global: phi of agent " + std::to_string(n + 1) +
                           " is singular");
    const Matrix inv = lu.inverse();
    weight_sum += inv;
    weighted.noalias() += inv * locals[n];
  }
  Eigen::FullPivLU<Matrix> lu(weight_sum);
  if (!lu.isInvertible())
    throw NumericalError("sw_rls_global: accumulated weight matrix is singular");
  return lu.solve(weighted);
}

MixedStepResult mixed_step(std::vector<RlsState> agents, const Vector& theta_g_prev,
                           const std::vector<Sample>& samples, bool weighted,
                           ExecPolicy policy) {
  if (agents.size() != samples.size())
    throw ConfigError("mixed_step: agents/samples size mismatch");
  const int N = static_cast<int>(agents.size());
  for_each_agent(N, policy, [&](int n) {
    const auto idx = static_cast<size_t>(n);
    agents[idx].theta = theta_g_prev;
    classical_rls_step(agents[idx], samples[idx]);
  });

  MixedStepResult out;
  if (weighted) {
    std::vector<Vector> locals(agents.size());
    std::vector<Matrix> phis(agents.size());
    for (size_t n = 0; n < agents.size(); ++n) {
      locals[n] = agents[n].theta;
      phis[n] = agents[n].phi;
    }
    out.theta_g = sw_rls_global(locals, phis);
  } else {
    std::vector<Vector> locals(agents.size());
    for (size_t n = 0; n < agents.size(); ++n) locals[n] = agents[n].theta;
    out.theta_g = s_rls_global(locals);
  }
  out.agents = std::move(agents);
  return out;
}

}  // namespace cloudrls
