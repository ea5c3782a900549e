#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cloudrls {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid configuration or malformed input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A recursion became numerically unusable. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A regressor was requested before enough signal history exists.
class WarmupError : public std::runtime_error {
 public:
  explicit WarmupError(const std::string& msg) : std::runtime_error(msg) {}
};

/// One time step of output/regressor data for a single agent:
/// y(t) = X(t)' theta + e(t).
struct Sample {
  Vector y;     // n_y
  Matrix X;     // n_theta x n_y
  int t = 0;    // 1-based time index

  int n_theta() const { return static_cast<int>(X.rows()); }
  int n_y() const { return static_cast<int>(X.cols()); }
};

/// ARX model orders, shared by every agent in a scenario.
struct ArxModelSpec {
  int n_a = 1;  // output lags
  int n_b = 1;  // input lags
  int n_k = 0;  // input delay
  int n_y = 1;  // output dimension
  int n_u = 1;  // input dimension

  int n_theta() const { return n_a * n_y + n_b * n_u; }

  void validate() const {
    if (n_a < 0) throw ConfigError("ArxModelSpec: n_a must be >= 0");
    if (n_b < 1) throw ConfigError("ArxModelSpec: n_b must be >= 1");
    if (n_k < 0) throw ConfigError("ArxModelSpec: n_k must be >= 0");
    if (n_y < 1 || n_u < 1) throw ConfigError("ArxModelSpec: n_y and n_u must be >= 1");
  }
};

/// Regressor/measurement pair padded with penalty-scaled blocks so that the
/// consensus-regularized local update runs through the plain RLS recursion.
/// The measurement is zero-padded to the same width.
struct ExtendedSample {
  Matrix X;  // n_theta x m
  Vector y;  // m

  int width() const { return static_cast<int>(X.cols()); }
};

/// Per-agent recursive estimator state.
struct RlsState {
  Vector theta;          // n_theta
  Matrix phi;            // n_theta x n_theta, symmetric positive definite
  double lambda = 1.0;   // forgetting factor in (0, 1]
  int t = 0;             // last processed time index

  static RlsState init(const Vector& theta0, double phi0, double lambda) {
    RlsState s;
    s.theta = theta0;
    s.phi = phi0 * Matrix::Identity(theta0.size(), theta0.size());
    s.lambda = lambda;
    return s;
  }
};

/// Axis-aligned box [lo, hi], elementwise.
struct BoxConstraint {
  Vector lo;
  Vector hi;

  void validate() const {
    if (lo.size() != hi.size()) throw ConfigError("BoxConstraint: lo/hi size mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (lo[i] > hi[i])
        throw ConfigError("BoxConstraint: lo > hi at component " + std::to_string(i + 1));
    }
  }
};

enum class ConsensusVariant { Full, Partial, ConstrainedPartial };

/// Which consensus coupling the cloud enforces. P maps each local parameter
/// vector onto the shared coordinates (identity in the full variant); boxes
/// are per-agent bounds used only in the constrained variant.
class ConsensusMode {
 public:
  static ConsensusMode full(int n_theta) {
    ConsensusMode m;
    m.variant_ = ConsensusVariant::Full;
    m.P_ = Matrix::Identity(n_theta, n_theta);
    return m;
  }

  static ConsensusMode partial(Matrix P) {
    if (P.rows() < 1 || P.cols() < 1 || P.rows() > P.cols())
      throw ConfigError("ConsensusMode: P must be n_g x n_theta with n_g <= n_theta");
    ConsensusMode m;
    m.variant_ = ConsensusVariant::Partial;
    m.P_ = std::move(P);
    return m;
  }

  static ConsensusMode constrained(Matrix P, std::vector<BoxConstraint> boxes) {
    ConsensusMode m = partial(std::move(P));
    m.variant_ = ConsensusVariant::ConstrainedPartial;
    for (const auto& b : boxes) {
      b.validate();
      if (b.lo.size() != m.P_.cols())
        throw ConfigError("ConsensusMode: box dimension does not match n_theta");
    }
    m.boxes_ = std::move(boxes);
    return m;
  }

  ConsensusVariant variant() const { return variant_; }
  bool is_full() const { return variant_ == ConsensusVariant::Full; }
  bool is_constrained() const { return variant_ == ConsensusVariant::ConstrainedPartial; }
  const Matrix& P() const { return P_; }
  int n_g() const { return static_cast<int>(P_.rows()); }
  int n_theta() const { return static_cast<int>(P_.cols()); }
  const std::vector<BoxConstraint>& boxes() const { return boxes_; }
  const BoxConstraint& box(int agent) const { return boxes_.at(static_cast<size_t>(agent)); }

 private:
  ConsensusMode() = default;
  ConsensusVariant variant_ = ConsensusVariant::Full;
  Matrix P_;
  std::vector<BoxConstraint> boxes_;
};

/// ADMM penalty weights. `rho` drives the consensus coupling in the full and
/// partial variants; `rho1` (box) and `rho2` (consensus) drive the
/// constrained variant.
struct Penalties {
  double rho = 0.1;
  double rho1 = 0.0;
  double rho2 = 0.0;

  double consensus_weight(const ConsensusMode& mode) const {
    return mode.is_constrained() ? rho2 : rho;
  }

  void validate(const ConsensusMode& mode) const {
    if (mode.is_constrained()) {
      if (rho1 <= 0 || rho2 <= 0) throw ConfigError("Penalties: rho1 and rho2 must be > 0");
    } else {
      if (rho <= 0) throw ConfigError("Penalties: rho must be > 0");
    }
  }
};

}  // namespace cloudrls
