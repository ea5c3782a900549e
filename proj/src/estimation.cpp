#include "cloudrls/estimation.hpp"

#include <cmath>
#include <string>

namespace cloudrls {

ExtendedSample extend_sample(const Sample& sample, const ConsensusMode& mode, double lambda,
                             const Penalties& penalties) {
  if (lambda <= 0.0 || lambda > 1.0)
    throw ConfigError("extend_sample: lambda must lie in (0, 1]");
  penalties.validate(mode);
  const int n_theta = sample.n_theta();
  const int n_y = sample.n_y();
  if (mode.n_theta() != n_theta)
    throw ConfigError("extend_sample: P has " + std::to_string(mode.n_theta()) +
                      " columns but the sample has " + std::to_string(n_theta) + " parameters");

  const double fade = 1.0 - lambda;  // exactly zero when lambda == 1
  ExtendedSample ext;
  switch (mode.variant()) {
    case ConsensusVariant::Full: {
      const int m = n_y + n_theta;
      ext.X.setZero(n_theta, m);
      ext.X.leftCols(n_y) = sample.X;
      ext.X.rightCols(n_theta).diagonal().setConstant(std::sqrt(fade * penalties.rho));
      ext.y.setZero(m);
      ext.y.head(n_y) = sample.y;
      break;
    }
    case ConsensusVariant::Partial: {
      const int m = n_y + mode.n_g();
      ext.X.resize(n_theta, m);
      ext.X.leftCols(n_y) = sample.X;
      ext.X.rightCols(mode.n_g()) = std::sqrt(penalties.rho * fade) * mode.P().transpose();
      ext.y.setZero(m);
      ext.y.head(n_y) = sample.y;
      break;
    }
    case ConsensusVariant::ConstrainedPartial: {
      const int m = n_y + n_theta + mode.n_g();
      ext.X.setZero(n_theta, m);
      ext.X.leftCols(n_y) = sample.X;
      ext.X.middleCols(n_y, n_theta).diagonal().setConstant(std::sqrt(fade * penalties.rho1));
      ext.X.rightCols(mode.n_g()) = std::sqrt(fade * penalties.rho2) * mode.P().transpose();
      ext.y.setZero(m);
      ext.y.head(n_y) = sample.y;
      break;
    }
  }
  return ext;
}

ExtendedSample classical_sample(const Sample& sample) {
  return ExtendedSample{sample.X, sample.y};
}

GainUpdate gain_update(const RlsState& state, const ExtendedSample& ext) {
  const int n_theta = static_cast<int>(state.phi.rows());
  const int m = ext.width();
  if (ext.X.rows() != n_theta)
    throw ConfigError("gain_update: extended regressor rows do not match state dimension");

  Matrix phiX = state.phi * ext.X;  // n_theta x m
  Matrix R = state.lambda * Matrix::Identity(m, m);
  R.noalias() += ext.X.transpose() * phiX;

  if (!R.allFinite())
    throw NumericalError("gain_update: inner matrix R is not finite");
  Eigen::LLT<Matrix> llt(R);
  if (llt.info() != Eigen::Success)
    throw NumericalError("gain_update: inner matrix R is not positive definite");

  GainUpdate out;
  out.K = llt.solve(phiX.transpose()).transpose();  // phi X~ R^-1
  out.phi_new = state.phi;
  out.phi_new.noalias() -= out.K * phiX.transpose();
  out.phi_new /= state.lambda;
  out.phi_new = 0.5 * (out.phi_new + out.phi_new.transpose()).eval();
  return out;
}

Vector local_rls_update(const Matrix& K, const ExtendedSample& ext, const Vector& theta_prev) {
  if (theta_prev.size() != ext.X.rows())
    throw ConfigError("local_rls_update: theta_prev dimension mismatch");
  Vector innovation = ext.y - ext.X.transpose() * theta_prev;
  return theta_prev + K * innovation;
}

void classical_rls_step(RlsState& state, const Sample& sample) {
  const ExtendedSample ext = classical_sample(sample);
  GainUpdate g = gain_update(state, ext);
  state.theta = local_rls_update(g.K, ext, state.theta);
  state.phi = std::move(g.phi_new);
  state.t = sample.t;
}

}  // namespace cloudrls
