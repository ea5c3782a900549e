#include "cloudrls/simulation.hpp"

#include "cloudrls/estimation.hpp"
#include "cloudrls/greedy.hpp"

#include <string>
#include <utility>

namespace cloudrls {

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::CRls: return "c-rls";
    case Estimator::SRls: return "s-rls";
    case Estimator::SwRls: return "sw-rls";
    case Estimator::MRls: return "m-rls";
    case Estimator::MwRls: return "mw-rls";
    case Estimator::AdmmRls: return "admm-rls";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  for (Estimator e : all_estimators())
    if (name == estimator_name(e)) return e;
  throw ConfigError("unknown estimator '" + name +
                    "' (expected c-rls, s-rls, sw-rls, m-rls, mw-rls or admm-rls)");
}

std::vector<Estimator> all_estimators() {
  return {Estimator::CRls, Estimator::SRls, Estimator::SwRls,
          Estimator::MRls, Estimator::MwRls, Estimator::AdmmRls};
}

void InMemoryChannel::send_to_cloud(NodeToCloudMsg msg) {
  ++log_->node_to_cloud;
  log_->node_to_cloud_elements += msg.theta_rls.size() + msg.phi.size();
  if (log_->record_events) log_->events.push_back({msg.t, msg.agent_id, true});
  cloud_inbox_.push_back(std::move(msg));
}

void InMemoryChannel::send_to_node(CloudToNodeMsg msg) {
  ++log_->cloud_to_node;
  log_->cloud_to_node_elements += msg.theta.size();
  if (log_->record_events) log_->events.push_back({msg.t, msg.agent_id, false});
  node_inbox_.push_back(std::move(msg));
}

std::vector<NodeToCloudMsg> InMemoryChannel::take_cloud_inbox(int expected, int t) {
  if (static_cast<int>(cloud_inbox_.size()) != expected)
    throw NumericalError("channel barrier: expected " + std::to_string(expected) +
                         " uploads at t=" + std::to_string(t) + ", have " +
                         std::to_string(cloud_inbox_.size()));
  for (const auto& m : cloud_inbox_)
    if (m.t != t)
      throw NumericalError("channel barrier: stale upload from agent " +
                           std::to_string(m.agent_id) + " at t=" + std::to_string(t));
  return std::exchange(cloud_inbox_, {});
}

std::vector<CloudToNodeMsg> InMemoryChannel::take_node_inbox(int expected, int t) {
  if (static_cast<int>(node_inbox_.size()) != expected)
    throw NumericalError("channel barrier: expected " + std::to_string(expected) +
                         " downloads at t=" + std::to_string(t));
  for (const auto& m : node_inbox_)
    if (m.t != t) throw NumericalError("channel barrier: stale download at t=" + std::to_string(t));
  return std::exchange(node_inbox_, {});
}

namespace {

RunResult make_result(const ScenarioConfig& cfg, Estimator est, const Dataset& data) {
  RunResult r;
  r.estimator = est;
  r.seed = cfg.seed;
  r.num_agents = cfg.num_agents;
  r.horizon = cfg.horizon;
  r.n_theta = cfg.n_theta();
  r.n_g = cfg.n_g();
  r.theta_g.resize(r.n_g, r.horizon);
  r.magnitude_warning = data.magnitude_warning;
  return r;
}

void require_full_consensus(const ScenarioConfig& cfg, Estimator est) {
  if (cfg.variant != ConsensusVariant::Full)
    throw ConfigError(std::string(estimator_name(est)) +
                      " supports full-consensus scenarios only; use admm-rls for partial or "
                      "constrained consensus");
}

[[noreturn]] void rethrow_with_context(const NumericalError& e, int agent_id, int t, int k) {
  throw NumericalError("agent " + std::to_string(agent_id) + ", t=" + std::to_string(t) +
                       ", k=" + std::to_string(k) + ": " + e.what());
}

RunResult run_admm(const ScenarioConfig& cfg, const Dataset& data,
                   const SimulationOptions& opt) {
  const int N = cfg.num_agents;
  const int T = cfg.horizon;
  RunResult res = make_result(cfg, Estimator::AdmmRls, data);
  res.log.record_events = opt.record_events;
  InMemoryChannel channel(res.log);

  const ConsensusMode mode = make_mode(cfg, data);
  const std::vector<double> lambdas(static_cast<size_t>(N), cfg.lambda);
  CloudState cloud =
      CloudState::init(mode, cfg.penalties, lambdas, data.theta_g0, data.theta0);

  std::vector<RlsState> agents;
  agents.reserve(static_cast<size_t>(N));
  for (int n = 0; n < N; ++n)
    agents.push_back(RlsState::init(data.theta0[static_cast<size_t>(n)], cfg.phi0, cfg.lambda));
  std::vector<Vector> feedback = data.theta0;  // estimate each node last received

  res.fused.assign(static_cast<size_t>(N), Matrix(res.n_theta, T));
  res.rls.assign(static_cast<size_t>(N), Matrix(res.n_theta, T));
  res.duals.assign(static_cast<size_t>(N), Matrix(res.n_g, T));
  const bool constrained = mode.is_constrained();
  if (constrained) {
    res.duals_box.assign(static_cast<size_t>(N), Matrix(res.n_theta, T));
    res.z.assign(static_cast<size_t>(N), Matrix(res.n_theta, T));
  }
  res.admm_iterations.resize(static_cast<size_t>(T));

  std::vector<AgentPayload> payloads(static_cast<size_t>(N));
  for (int t = 1; t <= T; ++t) {
    // Local phase: one recursive update per node, clocked by the node itself
    // and independent of the cloud's inner iteration count.
    for_each_agent(N, opt.policy, [&](int n) {
      const auto idx = static_cast<size_t>(n);
      try {
        const Sample sample = data.at(n, t);
        const ExtendedSample ext = extend_sample(sample, mode, cfg.lambda, cfg.penalties);
        GainUpdate gain = gain_update(agents[idx], ext);
        agents[idx].phi = std::move(gain.phi_new);
        agents[idx].theta = local_rls_update(gain.K, ext, feedback[idx]);
        agents[idx].t = t;
      } catch (const NumericalError& e) {
        rethrow_with_context(e, n + 1, t, 0);
      }
    });
    res.log.rls_updates += N;
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      channel.send_to_cloud({n + 1, t, agents[idx].theta, agents[idx].phi});
    }

    // Global phase: barrier, inner consensus loop, results back to the nodes.
    for (auto& msg : channel.take_cloud_inbox(N, t)) {
      auto& slot = payloads[static_cast<size_t>(msg.agent_id - 1)];
      slot.theta_rls = std::move(msg.theta_rls);
      slot.phi = std::move(msg.phi);
    }
    CloudStepResult step;
    try {
      step = cloud_iterate(cloud, payloads, cfg.admm, opt.policy);
    } catch (const NumericalError& e) {
      rethrow_with_context(e, 0, t, cloud.iteration);
    }
    for (int n = 0; n < N; ++n)
      channel.send_to_node({n + 1, t, step.fused[static_cast<size_t>(n)]});
    for (auto& msg : channel.take_node_inbox(N, t))
      feedback[static_cast<size_t>(msg.agent_id - 1)] = std::move(msg.theta);

    res.theta_g.col(t - 1) = step.global;
    res.admm_iterations[static_cast<size_t>(t - 1)] = step.iterations;
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      res.rls[idx].col(t - 1) = agents[idx].theta;
      res.fused[idx].col(t - 1) = step.fused[idx];
      res.duals[idx].col(t - 1) = cloud.prev_duals[idx];
      if (constrained) {
        res.duals_box[idx].col(t - 1) = cloud.prev_duals_box[idx];
        res.z[idx].col(t - 1) = cloud.prev_z[idx];
      }
    }
  }
  return res;
}

RunResult run_greedy(const ScenarioConfig& cfg, Estimator est, const Dataset& data,
                     const SimulationOptions& opt) {
  require_full_consensus(cfg, est);
  const bool mixed = est == Estimator::MRls || est == Estimator::MwRls;
  const bool weighted = est == Estimator::SwRls || est == Estimator::MwRls;
  const int N = cfg.num_agents;
  const int T = cfg.horizon;

  RunResult res = make_result(cfg, est, data);
  res.log.record_events = opt.record_events;
  InMemoryChannel channel(res.log);

  std::vector<RlsState> agents;
  agents.reserve(static_cast<size_t>(N));
  for (int n = 0; n < N; ++n)
    agents.push_back(RlsState::init(data.theta0[static_cast<size_t>(n)], cfg.phi0, cfg.lambda));

  res.fused.assign(static_cast<size_t>(N), Matrix(res.n_theta, T));
  res.rls.assign(static_cast<size_t>(N), Matrix(res.n_theta, T));

  Vector theta_g_prev = data.theta_g0;  // consumed by the mixed variants only
  for (int t = 1; t <= T; ++t) {
    for_each_agent(N, opt.policy, [&](int n) {
      const auto idx = static_cast<size_t>(n);
      try {
        if (mixed) agents[idx].theta = theta_g_prev;  // prior injected before the update
        classical_rls_step(agents[idx], data.at(n, t));
      } catch (const NumericalError& e) {
        rethrow_with_context(e, n + 1, t, 0);
      }
    });
    res.log.rls_updates += N;

    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      NodeToCloudMsg msg{n + 1, t, agents[idx].theta, {}};
      if (weighted) msg.phi = agents[idx].phi;
      channel.send_to_cloud(std::move(msg));
    }
    auto inbox = channel.take_cloud_inbox(N, t);
    std::vector<Vector> locals(static_cast<size_t>(N));
    std::vector<Matrix> phis(weighted ? static_cast<size_t>(N) : 0);
    for (auto& msg : inbox) {
      locals[static_cast<size_t>(msg.agent_id - 1)] = std::move(msg.theta_rls);
      if (weighted) phis[static_cast<size_t>(msg.agent_id - 1)] = std::move(msg.phi);
    }
    Vector theta_g;
    try {
      theta_g = weighted ? sw_rls_global(locals, phis) : s_rls_global(locals);
    } catch (const NumericalError& e) {
      rethrow_with_context(e, 0, t, 0);
    }

    if (mixed) {
      // Fed back to every node for the next step; recorded as a broadcast.
      for (int n = 0; n < N; ++n) channel.send_to_node({n + 1, t, theta_g});
      auto fb = channel.take_node_inbox(N, t);
      theta_g_prev = std::move(fb.front().theta);
    }

    res.theta_g.col(t - 1) = theta_g;
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      res.rls[idx].col(t - 1) = agents[idx].theta;
      res.fused[idx].col(t - 1) = agents[idx].theta;
    }
  }
  return res;
}

RunResult run_centralized(const ScenarioConfig& cfg, const Dataset& data,
                          const SimulationOptions& opt) {
  require_full_consensus(cfg, Estimator::CRls);
  const int N = cfg.num_agents;
  const int T = cfg.horizon;
  RunResult res = make_result(cfg, Estimator::CRls, data);
  res.log.record_events = opt.record_events;
  InMemoryChannel channel(res.log);

  RlsState state = RlsState::init(data.theta_g0, cfg.phi0, cfg.lambda);
  for (int t = 1; t <= T; ++t) {
    // Nodes upload their raw output/regressor pairs.
    for (int n = 0; n < N; ++n) {
      const Sample s = data.at(n, t);
      channel.send_to_cloud({n + 1, t, s.y, s.X});
    }
    auto inbox = channel.take_cloud_inbox(N, t);
    std::vector<Sample> samples(static_cast<size_t>(N));
    for (auto& msg : inbox) {
      auto& s = samples[static_cast<size_t>(msg.agent_id - 1)];
      s.y = std::move(msg.theta_rls);
      s.X = std::move(msg.phi);
      s.t = t;
    }
    try {
      state = centralized_rls_step(state, lump_samples(samples));
    } catch (const NumericalError& e) {
      rethrow_with_context(e, 0, t, 0);
    }
    res.theta_g.col(t - 1) = state.theta;
  }
  return res;
}

}  // namespace

RunResult run_simulation(const ScenarioConfig& cfg, Estimator estimator,
                         const SimulationOptions& options, const Dataset* shared_data) {
  cfg.validate();
  Dataset local_data;
  const Dataset* data = shared_data;
  if (!data) {
    local_data = generate(cfg);
    data = &local_data;
  }
  switch (estimator) {
    case Estimator::AdmmRls: return run_admm(cfg, *data, options);
    case Estimator::CRls: return run_centralized(cfg, *data, options);
    default: return run_greedy(cfg, estimator, *data, options);
  }
}

}  // namespace cloudrls
