#pragma once

#include "cloudrls/admm.hpp"
#include "cloudrls/parallel.hpp"
#include "cloudrls/scenario.hpp"
#include "cloudrls/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cloudrls {

enum class Estimator { CRls, SRls, SwRls, MRls, MwRls, AdmmRls };

const char* estimator_name(Estimator e);
Estimator parse_estimator(const std::string& name);  // throws ConfigError
std::vector<Estimator> all_estimators();

/// Per-step upload from one node. The consensus estimators send their local
/// estimate and covariance-style matrix; the centralized baseline reuses the
/// same envelope to ship its raw output/regressor pair.
struct NodeToCloudMsg {
  int agent_id = 0;  // 1-based
  int t = 0;
  Vector theta_rls;
  Matrix phi;
};

/// Fused estimate returned to a node after the cloud finishes step t.
struct CloudToNodeMsg {
  int agent_id = 0;
  int t = 0;
  Vector theta;
};

struct TransmissionLog {
  long node_to_cloud = 0;
  long cloud_to_node = 0;
  long node_to_cloud_elements = 0;  // scalar payload entries
  long cloud_to_node_elements = 0;
  long rls_updates = 0;  // local recursions executed (one per agent per step)

  struct Event {
    int t;
    int agent_id;
    bool to_cloud;
  };
  bool record_events = false;
  std::vector<Event> events;
};

/// Transport between the nodes and the cloud. In-memory by default; the
/// interface is the seam where a real transport would plug in.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send_to_cloud(NodeToCloudMsg msg) = 0;
  virtual void send_to_node(CloudToNodeMsg msg) = 0;
  /// Synchronous barrier: all `expected` uploads for step t must be present.
  virtual std::vector<NodeToCloudMsg> take_cloud_inbox(int expected, int t) = 0;
  virtual std::vector<CloudToNodeMsg> take_node_inbox(int expected, int t) = 0;
};

class InMemoryChannel : public Channel {
 public:
  explicit InMemoryChannel(TransmissionLog& log) : log_(&log) {}
  void send_to_cloud(NodeToCloudMsg msg) override;
  void send_to_node(CloudToNodeMsg msg) override;
  std::vector<NodeToCloudMsg> take_cloud_inbox(int expected, int t) override;
  std::vector<CloudToNodeMsg> take_node_inbox(int expected, int t) override;

 private:
  TransmissionLog* log_;
  std::vector<NodeToCloudMsg> cloud_inbox_;
  std::vector<CloudToNodeMsg> node_inbox_;
};

/// Full per-step trajectories of one estimator run.
struct RunResult {
  Estimator estimator = Estimator::AdmmRls;
  std::uint64_t seed = 0;
  int num_agents = 0;
  int horizon = 0;
  int n_theta = 0;
  int n_g = 0;

  Matrix theta_g;                  // n_g x T
  std::vector<Matrix> fused;       // per agent, n_theta x T (empty for C-RLS)
  std::vector<Matrix> rls;         // per agent, n_theta x T (local-only estimates)
  std::vector<Matrix> duals;       // per agent, n_g x T (consensus runs)
  std::vector<Matrix> duals_box;   // per agent, n_theta x T (constrained runs)
  std::vector<Matrix> z;           // per agent, n_theta x T (constrained runs)
  std::vector<int> admm_iterations;  // per step (consensus runs)

  TransmissionLog log;
  bool magnitude_warning = false;
};

/// The default policy is serial: at the shipped scenario sizes the run time
/// is dominated by the cloud's inner loop, whose per-agent bodies are a few
/// small matrix products each. ExecPolicy::Parallel runs the per-agent
/// kernels under OpenMP (bitwise-identical results) and pays off once the
/// local phase carries real per-agent work; see the bench target.
struct SimulationOptions {
  ExecPolicy policy = ExecPolicy::Serial;
  bool record_events = false;
};

/// Runs one estimator over a scenario: per step, every node executes its
/// Local phase, uploads through the channel barrier, the cloud runs its
/// Global phase and sends results back. Deterministic for a given config.
/// `shared_data` lets callers reuse one generated dataset across estimators;
/// when null the dataset is generated from the config.
RunResult run_simulation(const ScenarioConfig& config, Estimator estimator,
                         const SimulationOptions& options = {},
                         const Dataset* shared_data = nullptr);

/// The per-agent sample streams every estimator consumes (identical for a
/// given config regardless of the estimator choice).
inline Dataset replay_inputs(const ScenarioConfig& config) { return generate(config); }

}  // namespace cloudrls
