#pragma once

#include "cloudrls/types.hpp"

namespace cloudrls {

/// Pads a sample with the mode's penalty-scaled blocks:
///   full:        [X  sqrt((1-lambda) rho)   I]
///   partial:     [X  sqrt(rho (1-lambda))   P']
///   constrained: [X  sqrt((1-lambda) rho1) I  sqrt((1-lambda) rho2) P']
/// and zero-pads the measurement to the same width. With lambda = 1 every
/// augmentation block is exactly zero.
ExtendedSample extend_sample(const Sample& sample, const ConsensusMode& mode, double lambda,
                             const Penalties& penalties);

/// Plain regressor/measurement pair, no augmentation. This is the local
/// update used by the greedy estimators.
ExtendedSample classical_sample(const Sample& sample);

struct GainUpdate {
  Matrix K;        // n_theta x m
  Matrix phi_new;  // n_theta x n_theta, symmetrized
};

/// One covariance-style recursion step via the matrix inversion lemma:
///   R = lambda I_m + X~' phi X~,  K = phi X~ R^-1,
///   phi_new = (I - K X~') phi / lambda, then phi_new <- (phi_new + phi_new')/2.
/// The m x m system is solved directly. Throws NumericalError when R is not
/// positive definite (cannot happen for lambda > 0 and SPD phi).
GainUpdate gain_update(const RlsState& state, const ExtendedSample& ext);

/// Recursive local estimate given this step's gain:
///   theta_rls = theta_prev + K (y~ - X~' theta_prev).
/// theta_prev is the estimate fed back for this agent at t-1 (the fused one
/// when a cloud is in the loop, the agent's own estimate otherwise).
Vector local_rls_update(const Matrix& K, const ExtendedSample& ext, const Vector& theta_prev);

/// Classical RLS step with forgetting: updates state.theta/state.phi in
/// place from its own previous estimate.
void classical_rls_step(RlsState& state, const Sample& sample);

}  // namespace cloudrls
