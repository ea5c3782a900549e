#pragma once

#include "cloudrls/admm.hpp"
#include "cloudrls/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cloudrls {

/// How each agent's true parameter vector evolves.
enum class TruthLaw {
  Constant,     // one shared vector, fixed over time
  SinCos,       // theta_1(t) = a1 sin(x), theta_2(t) = a2 cos(x), x sweeping [0, 2pi]
  GlobalLocal,  // shared values everywhere except one per-agent component
};

struct TruthSpec {
  TruthLaw law = TruthLaw::Constant;
  Vector theta;           // Constant
  Vector amplitudes;      // SinCos (a1, a2)
  Vector global_values;   // GlobalLocal
  int local_position = 2; // GlobalLocal, 1-based component index
  double local_mean = 0.4;
  double local_stddev = 0.05;
};

/// i.i.d. uniform input on [low, high].
struct InputSpec {
  double low = 2.0;
  double high = 3.0;
};

struct NoiseSpec {
  enum class Kind { UniformIntVariance, FixedVariance };
  Kind kind = Kind::UniformIntVariance;
  double low = 1.0;    // integer variance drawn uniformly from [low, high]
  double high = 30.0;
  double value = 1.0;  // FixedVariance
};

/// Agent anomalies. Non-informative agents get a null input sequence and a
/// tiny noise variance; failing agents switch their true parameters once, at
/// a step drawn uniformly from the configured window (fractions of T).
struct AnomalySpec {
  int non_informative_count = 0;
  std::vector<int> non_informative_agents;  // explicit 1-based ids (optional)
  double non_informative_variance = 1e-8;

  int failure_count = 0;
  std::vector<int> failure_agents;
  double failure_window_low = 0.375;
  double failure_window_high = 0.75;
  Vector failure_low;   // per-component uniform bounds for the post-switch vector
  Vector failure_high;

  bool any_non_informative() const {
    return non_informative_count > 0 || !non_informative_agents.empty();
  }
  bool any_failure() const { return failure_count > 0 || !failure_agents.empty(); }
};

enum class BoxSet { None, S1, S2, S3, Explicit };

/// Declarative description of one experiment: the agent population, the true
/// parameter law, signals and noise, anomalies, estimator initialization and
/// solver settings. Everything downstream is a pure function of this struct.
struct ScenarioConfig {
  std::string name = "custom";
  int num_agents = 1;
  int horizon = 1;
  std::uint64_t seed = 1;

  ArxModelSpec model;
  TruthSpec truth;
  InputSpec input;
  NoiseSpec noise;
  AnomalySpec anomalies;

  double lambda = 1.0;
  double phi0 = 0.1;
  double init_local_stddev = std::sqrt(2.0);
  double init_global_stddev = 1.0;

  ConsensusVariant variant = ConsensusVariant::Full;
  Matrix P;  // used by Partial/ConstrainedPartial
  BoxSet box_set = BoxSet::None;
  Vector box_low, box_high;  // BoxSet::Explicit

  Penalties penalties;
  AdmmSettings admm;

  int n_theta() const { return model.n_theta(); }
  int n_g() const {
    return variant == ConsensusVariant::Full ? n_theta() : static_cast<int>(P.rows());
  }
  void validate() const;
};

/// Everything generated for one scenario draw: per-agent signal streams,
/// ground truth, estimator initial conditions and (when constrained) the
/// per-agent boxes. Identical for every estimator run on the same config.
struct AgentData {
  Matrix X;              // n_theta x T regressors
  Eigen::RowVectorXd y;  // outputs
  Eigen::RowVectorXd e;  // realized noise
  Eigen::RowVectorXd u;  // inputs
  Matrix truth;          // n_theta x T true parameters
  double noise_variance = 0.0;
  bool non_informative = false;
  int failure_time = -1;  // 1-based switch step, -1 when none
};

struct Dataset {
  std::vector<AgentData> agents;
  Matrix truth_global;         // n_g x T
  std::vector<Vector> theta0;  // initial local estimates
  Vector theta_g0;             // initial global estimate
  std::vector<BoxConstraint> boxes;  // one per agent; empty unless constrained
  bool magnitude_warning = false;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int horizon() const { return static_cast<int>(truth_global.cols()); }

  Sample at(int agent, int t) const {
    const auto& a = agents[static_cast<size_t>(agent)];
    Sample s;
    s.X = a.X.col(t - 1);
    s.y = Vector::Constant(1, a.y(t - 1));
    s.t = t;
    return s;
  }
};

/// Simulates the ARX recursion for every agent from rest (zero-padded
/// history), reproducibly from the scenario seed. Outputs whose magnitude
/// exceeds 1e9 set the dataset's magnitude warning.
Dataset generate(const ScenarioConfig& config);

/// Consensus mode for this scenario; constrained boxes are built from the
/// generated truth (they are centered on each agent's local parameter).
ConsensusMode make_mode(const ScenarioConfig& config, const Dataset& data);

/// Named built-in scenarios.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
std::string preset_config_text(const std::string& name);
ScenarioConfig load_preset(const std::string& name);

}  // namespace cloudrls
