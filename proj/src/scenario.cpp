#include "cloudrls/scenario.hpp"

#include "cloudrls/regressor.hpp"
#include "cloudrls/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace cloudrls {

namespace {

// Substream purposes, keyed together with the scenario seed.
constexpr std::uint64_t kStreamGlobalInit = 1;
constexpr std::uint64_t kStreamAnomaly = 2;
constexpr std::uint64_t kStreamAgentData = 3;
constexpr std::uint64_t kStreamAgentInit = 4;

constexpr double kMagnitudeGuard = 1e9;
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_agent_ids(const std::vector<int>& ids, int N, const std::string& what) {
  for (int id : ids) {
    if (id < 1 || id > N)
      throw ConfigError("ScenarioConfig: " + what + " agent id " + std::to_string(id) +
                        " outside 1.." + std::to_string(N));
  }
}

// k distinct 0-based agent indices, drawn by partial Fisher-Yates so the
// draw count is independent of N's ordering.
std::vector<int> sample_agents(int k, int N, const std::set<int>& excluded, Rng& rng) {
  std::vector<int> pool;
  pool.reserve(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i)
    if (!excluded.count(i)) pool.push_back(i);
  if (k > static_cast<int>(pool.size()))
    throw ConfigError("ScenarioConfig: anomaly count exceeds available agents");
  std::vector<int> picked;
  picked.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const long j = rng.uniform_int(i, static_cast<long>(pool.size()) - 1);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    picked.push_back(pool[static_cast<size_t>(i)]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

// Nominal (anomaly-free) parameter trajectory shared by all agents; the
// GlobalLocal law uses the population mean for the local slot, which the
// consensus map P zeroes out anyway.
Matrix nominal_truth(const ScenarioConfig& cfg) {
  const int T = cfg.horizon;
  const int d = cfg.n_theta();
  Matrix truth(d, T);
  switch (cfg.truth.law) {
    case TruthLaw::Constant:
      truth.colwise() = cfg.truth.theta;
      break;
    case TruthLaw::SinCos:
      for (int t = 0; t < T; ++t) {
        const double x = T > 1 ? kTwoPi * static_cast<double>(t) / static_cast<double>(T - 1)
                               : 0.0;
        truth(0, t) = cfg.truth.amplitudes[0] * std::sin(x);
        truth(1, t) = cfg.truth.amplitudes[1] * std::cos(x);
      }
      break;
    case TruthLaw::GlobalLocal: {
      Vector base(d);
      int g = 0;
      for (int i = 0; i < d; ++i)
        base[i] = (i == cfg.truth.local_position - 1) ? cfg.truth.local_mean
                                                      : cfg.truth.global_values[g++];
      truth.colwise() = base;
      break;
    }
  }
  return truth;
}

BoxConstraint named_box(BoxSet set, double local) {
  BoxConstraint b;
  b.lo.resize(3);
  b.hi.resize(3);
  switch (set) {
    case BoxSet::S1:
      b.lo << 0.195, local - 0.05, 0.795;
      b.hi << 0.205, local + 0.05, 0.805;
      break;
    case BoxSet::S2:
      b.lo << 0.19, local - 0.1, 0.79;
      b.hi << 0.21, local + 0.1, 0.81;
      break;
    case BoxSet::S3:
      b.lo << 0.15, local - 0.5, 0.75;
      b.hi << 0.25, local + 0.5, 0.85;
      break;
    default:
      throw ConfigError("named_box: not a named box set");
  }
  return b;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (num_agents < 1) throw ConfigError("ScenarioConfig: agents must be >= 1");
  if (horizon < 1) throw ConfigError("ScenarioConfig: horizon must be >= 1");
  model.validate();
  if (model.n_y != 1 || model.n_u != 1)
    throw ConfigError("ScenarioConfig: generation supports scalar signals only");

  const int d = n_theta();
  switch (truth.law) {
    case TruthLaw::Constant:
      if (truth.theta.size() != d)
        throw ConfigError("ScenarioConfig: truth.theta must have length n_theta = " +
                          std::to_string(d));
      break;
    case TruthLaw::SinCos:
      if (d != 2 || truth.amplitudes.size() != 2)
        throw ConfigError("ScenarioConfig: the sincos law needs n_theta = 2 and two amplitudes");
      break;
    case TruthLaw::GlobalLocal:
      if (truth.global_values.size() + 1 != d)
        throw ConfigError("ScenarioConfig: global_local law needs n_theta - 1 global values");
      if (truth.local_position < 1 || truth.local_position > d)
        throw ConfigError("ScenarioConfig: local_position outside 1..n_theta");
      if (truth.local_stddev < 0) throw ConfigError("ScenarioConfig: local_stddev must be >= 0");
      break;
  }

  if (input.low > input.high) throw ConfigError("ScenarioConfig: input.low > input.high");
  if (noise.kind == NoiseSpec::Kind::UniformIntVariance) {
    if (noise.low <= 0 || noise.high < noise.low)
      throw ConfigError("ScenarioConfig: noise variance bounds must satisfy 0 < low <= high");
  } else if (noise.value <= 0) {
    throw ConfigError("ScenarioConfig: noise variance must be > 0");
  }

  check_agent_ids(anomalies.non_informative_agents, num_agents, "non-informative");
  check_agent_ids(anomalies.failure_agents, num_agents, "failure");
  if (anomalies.non_informative_count < 0 || anomalies.failure_count < 0)
    throw ConfigError("ScenarioConfig: anomaly counts must be >= 0");
  if (anomalies.non_informative_variance <= 0)
    throw ConfigError("ScenarioConfig: non_informative_variance must be > 0");
  if (anomalies.any_failure()) {
    if (truth.law != TruthLaw::Constant)
      throw ConfigError("ScenarioConfig: failures require the constant truth law");
    if (anomalies.failure_low.size() != d || anomalies.failure_high.size() != d)
      throw ConfigError("ScenarioConfig: failure bounds must have length n_theta");
    if (anomalies.failure_window_low < 0 || anomalies.failure_window_high > 1 ||
        anomalies.failure_window_low > anomalies.failure_window_high)
      throw ConfigError("ScenarioConfig: failure window must satisfy 0 <= low <= high <= 1");
  }

  if (lambda <= 0 || lambda > 1) throw ConfigError("ScenarioConfig: lambda must lie in (0, 1]");
  if (phi0 <= 0) throw ConfigError("ScenarioConfig: phi0 must be > 0");
  if (init_local_stddev < 0 || init_global_stddev < 0)
    throw ConfigError("ScenarioConfig: initial-estimate stddevs must be >= 0");

  if (variant != ConsensusVariant::Full) {
    if (P.rows() < 1 || P.cols() != d)
      throw ConfigError("ScenarioConfig: P must be n_g x n_theta with n_theta = " +
                        std::to_string(d));
    if (P.rows() > P.cols()) throw ConfigError("ScenarioConfig: P must have n_g <= n_theta");
  }
  if (variant == ConsensusVariant::ConstrainedPartial) {
    if (box_set == BoxSet::None)
      throw ConfigError("ScenarioConfig: constrained mode needs a box set");
    if (box_set == BoxSet::Explicit) {
      if (box_low.size() != d || box_high.size() != d)
        throw ConfigError("ScenarioConfig: explicit boxes must have length n_theta");
      BoxConstraint{box_low, box_high}.validate();
    } else if (truth.law != TruthLaw::GlobalLocal || d != 3 || truth.local_position != 2) {
      throw ConfigError(
          "ScenarioConfig: named box sets apply to the 3-parameter global/local model");
    }
  } else if (box_set != BoxSet::None) {
    throw ConfigError("ScenarioConfig: box sets require constrained mode");
  }

  ConsensusMode probe = variant == ConsensusVariant::Full
                            ? ConsensusMode::full(d)
                            : ConsensusMode::partial(P);
  Penalties pen = penalties;
  if (variant == ConsensusVariant::ConstrainedPartial) {
    // partial probe above; constrained penalties checked directly
    if (penalties.rho1 <= 0 || penalties.rho2 <= 0)
      throw ConfigError("Penalties: rho1 and rho2 must be > 0");
  } else {
    pen.validate(probe);
  }
  admm.validate();
}

Dataset generate(const ScenarioConfig& cfg) {
  cfg.validate();
  const int N = cfg.num_agents;
  const int T = cfg.horizon;
  const int d = cfg.n_theta();

  Dataset ds;
  ds.agents.resize(static_cast<size_t>(N));
  ds.theta0.resize(static_cast<size_t>(N));

  const Matrix nominal = nominal_truth(cfg);
  if (cfg.variant == ConsensusVariant::Full)
    ds.truth_global = nominal;
  else
    ds.truth_global = cfg.P * nominal;

  Rng init_rng = Rng::fork(cfg.seed, kStreamGlobalInit);
  ds.theta_g0.resize(ds.truth_global.rows());
  for (Eigen::Index i = 0; i < ds.theta_g0.size(); ++i)
    ds.theta_g0[i] = init_rng.normal(ds.truth_global(i, 0), cfg.init_global_stddev);

  // Anomaly membership: explicit lists win, otherwise a seeded draw.
  Rng anomaly_rng = Rng::fork(cfg.seed, kStreamAnomaly);
  std::set<int> ni_set, fail_set;
  if (!cfg.anomalies.non_informative_agents.empty()) {
    for (int id : cfg.anomalies.non_informative_agents) ni_set.insert(id - 1);
  } else if (cfg.anomalies.non_informative_count > 0) {
    for (int idx : sample_agents(cfg.anomalies.non_informative_count, N, {}, anomaly_rng))
      ni_set.insert(idx);
  }
  if (!cfg.anomalies.failure_agents.empty()) {
    for (int id : cfg.anomalies.failure_agents) {
      if (ni_set.count(id - 1))
        throw ConfigError("ScenarioConfig: agent " + std::to_string(id) +
                          " is both non-informative and failing");
      fail_set.insert(id - 1);
    }
  } else if (cfg.anomalies.failure_count > 0) {
    for (int idx : sample_agents(cfg.anomalies.failure_count, N, ni_set, anomaly_rng))
      fail_set.insert(idx);
  }

  const int switch_low = std::max(
      1, static_cast<int>(std::lround(cfg.anomalies.failure_window_low * T)));
  const int switch_high = std::min(
      T, std::max(switch_low,
                  static_cast<int>(std::lround(cfg.anomalies.failure_window_high * T))));

  for (int n = 0; n < N; ++n) {
    auto& agent = ds.agents[static_cast<size_t>(n)];
    Rng data_rng = Rng::fork(cfg.seed, kStreamAgentData, static_cast<std::uint64_t>(n));
    Rng est_rng = Rng::fork(cfg.seed, kStreamAgentInit, static_cast<std::uint64_t>(n));

    agent.non_informative = ni_set.count(n) > 0;
    agent.noise_variance =
        agent.non_informative
            ? cfg.anomalies.non_informative_variance
            : (cfg.noise.kind == NoiseSpec::Kind::UniformIntVariance
                   ? static_cast<double>(data_rng.uniform_int(
                         static_cast<long>(cfg.noise.low), static_cast<long>(cfg.noise.high)))
                   : cfg.noise.value);

    agent.truth = nominal;
    if (cfg.truth.law == TruthLaw::GlobalLocal) {
      const double local = data_rng.normal(cfg.truth.local_mean, cfg.truth.local_stddev);
      agent.truth.row(cfg.truth.local_position - 1).setConstant(local);
    }
    if (fail_set.count(n)) {
      agent.failure_time = static_cast<int>(data_rng.uniform_int(switch_low, switch_high));
      Vector post(d);
      for (int i = 0; i < d; ++i)
        post[i] = data_rng.uniform(cfg.anomalies.failure_low[i], cfg.anomalies.failure_high[i]);
      for (int t = agent.failure_time; t <= T; ++t) agent.truth.col(t - 1) = post;
    }

    ds.theta0[static_cast<size_t>(n)].resize(d);
    for (int i = 0; i < d; ++i)
      ds.theta0[static_cast<size_t>(n)][i] =
          est_rng.normal(agent.truth(i, 0), cfg.init_local_stddev);

    agent.X.resize(d, T);
    agent.y.resize(T);
    agent.e.resize(T);
    agent.u.resize(T);
    const double noise_scale = std::sqrt(agent.noise_variance);
    SignalHistory hist(cfg.model);
    for (int t = 1; t <= T; ++t) {
      agent.X.col(t - 1) =
          build_arx_regressor_padded(cfg.model, hist.outputs(), hist.inputs());
      const double u = agent.non_informative ? 0.0 : data_rng.uniform(cfg.input.low, cfg.input.high);
      const double e = noise_scale * data_rng.normal();
      const double y = agent.X.col(t - 1).dot(agent.truth.col(t - 1)) + e;
      if (std::abs(y) > kMagnitudeGuard) ds.magnitude_warning = true;
      agent.u(t - 1) = u;
      agent.e(t - 1) = e;
      agent.y(t - 1) = y;
      hist.push(y, u);
    }
  }

  if (cfg.variant == ConsensusVariant::ConstrainedPartial) {
    ds.boxes.resize(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n) {
      if (cfg.box_set == BoxSet::Explicit)
        ds.boxes[static_cast<size_t>(n)] = BoxConstraint{cfg.box_low, cfg.box_high};
      else
        ds.boxes[static_cast<size_t>(n)] = named_box(
            cfg.box_set, ds.agents[static_cast<size_t>(n)].truth(cfg.truth.local_position - 1, 0));
    }
  }
  return ds;
}

ConsensusMode make_mode(const ScenarioConfig& cfg, const Dataset& data) {
  switch (cfg.variant) {
    case ConsensusVariant::Full:
      return ConsensusMode::full(cfg.n_theta());
    case ConsensusVariant::Partial:
      return ConsensusMode::partial(cfg.P);
    case ConsensusVariant::ConstrainedPartial:
      return ConsensusMode::constrained(cfg.P, data.boxes);
  }
  throw ConfigError("make_mode: unknown consensus variant");
}

}  // namespace cloudrls
