#include "cloudrls/admm.hpp"
#include "cloudrls/rng.hpp"

#include "oracles.hpp"
#include "test_utils.hpp"

#include <doctest.h>

#include <cmath>

using namespace cloudrls;
using namespace cloudrls::testing;

TEST_CASE("project_box clamps, is idempotent, rejects bad bounds") {
  CHECK(project_box(vec({0.5}), vec({0.0}), vec({1.0}))[0] == 0.5);

  const Vector v = vec({1.5, -0.2});
  const Vector lo = vec({0.0, 0.0});
  const Vector hi = vec({1.0, 1.0});
  const Vector p = project_box(v, lo, hi);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);

  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    Vector x = vec({rng.normal(0, 3), rng.normal(0, 3)});
    const Vector once = project_box(x, lo, hi);
    CHECK(max_abs_diff(project_box(once, lo, hi), once) == 0.0);
  }
  CHECK_THROWS_AS(project_box(v, vec({1.0, 0.0}), vec({0.0, 1.0})), ConfigError);
}

TEST_CASE("fuse_local adds the correction") {
  CHECK(max_abs_diff(fuse_local(vec({1, 2}), vec({0, 0})), vec({1, 2})) == 0.0);
  CHECK(max_abs_diff(fuse_local(vec({0.5, 0.5}), vec({-0.5, 0.5})), vec({0, 1})) == 0.0);
}

TEST_CASE("global_update means locals and scaled duals") {
  const ConsensusMode full = ConsensusMode::full(2);

  std::vector<Vector> locals = {vec({1, 1}), vec({3, 3})};
  std::vector<Vector> duals = {vec({0, 0}), vec({0, 0})};
  CHECK(max_abs_diff(global_update(locals, duals, 1.0, full), vec({2, 2})) == 0.0);

  duals = {vec({1, 0}), vec({-1, 0})};
  CHECK(max_abs_diff(global_update(locals, duals, 1.0, full), vec({2, 2})) == 0.0);

  Matrix P(1, 2);
  P << 1, 0;
  const ConsensusMode partial = ConsensusMode::partial(P);
  locals = {vec({1, 5}), vec({3, 9})};
  std::vector<Vector> pduals = {vec({0.0}), vec({0.0})};
  CHECK(global_update(locals, pduals, 1.0, partial)[0] == 2.0);
}

TEST_CASE("dual updates are scaled residual ascent") {
  const ConsensusMode full = ConsensusMode::full(1);

  std::vector<Vector> duals = {vec({0.25})};
  std::vector<Vector> locals = {vec({2.0})};
  auto same = dual_update(duals, locals, vec({2.0}), 2.0, full);
  CHECK(same[0][0] == 0.25);

  auto moved = dual_update({vec({0.0})}, {vec({2.5})}, vec({2.0}), 2.0, full);
  CHECK(moved[0][0] == doctest::Approx(1.0).epsilon(1e-15));

  // box and consensus families move independently
  std::vector<Vector> z = {vec({1.0, 1.0})};
  std::vector<Vector> theta = {vec({1.0, 1.0})};
  auto box_same = dual_update_box({vec({0.5, -0.5})}, theta, z, 10.0);
  CHECK(max_abs_diff(box_same[0], vec({0.5, -0.5})) == 0.0);

  Matrix P(1, 2);
  P << 1, 0;
  auto consensus_moved =
      dual_update({vec({0.0})}, theta, vec({0.5}), 0.1, ConsensusMode::partial(P));
  CHECK(consensus_moved[0][0] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("admm_correction at the warm start with lambda = 1 is zero") {
  Rng rng(31);
  OracleProblem p = random_problem(rng, ConsensusVariant::Full, 3, 4, 3, 1);
  for (auto& l : p.lambdas) l = 1.0;
  CloudState cloud = CloudState::init(p.mode, p.penalties, p.lambdas, p.theta_g0, p.theta0);
  // current iterates equal the snapshot right after init
  cloud.global = cloud.prev_global;
  cloud.duals = cloud.prev_duals;
  const Matrix phi = random_spd(rng, p.mode.n_theta());
  CHECK(admm_correction(phi, cloud, 0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("admm_correction hand value in full mode") {
  // phi = I, rho = 1, lambda = 0: correction = rho * global
  ConsensusMode mode = ConsensusMode::full(2);
  Penalties pen;
  pen.rho = 1.0;
  CloudState cloud = CloudState::init(mode, pen, {0.0}, vec({1, 1}), {vec({0, 0})});
  cloud.global = vec({1, 1});
  cloud.duals[0] = vec({0, 0});
  const Vector corr = admm_correction(Matrix::Identity(2, 2), cloud, 0);
  CHECK(max_abs_diff(corr, vec({1, 1})) == 0.0);
}

TEST_CASE("one cloud iteration composes the public operations") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto variant = static_cast<ConsensusVariant>(trial % 3);
    OracleProblem p = random_problem(rng, variant, 3, 3, 3, 1);
    p.settings.max_iters = 1;
    p.settings.primal_tol = 0.0;

    CloudState cloud = CloudState::init(p.mode, p.penalties, p.lambdas, p.theta_g0, p.theta0);
    std::vector<AgentPayload> payloads(static_cast<size_t>(p.num_agents()));
    for (int n = 0; n < p.num_agents(); ++n) {
      payloads[static_cast<size_t>(n)].phi = random_spd(rng, p.mode.n_theta());
      payloads[static_cast<size_t>(n)].theta_rls = p.theta0[static_cast<size_t>(n)];
    }

    // hand-composed single iteration
    CloudState manual = CloudState::init(p.mode, p.penalties, p.lambdas, p.theta_g0, p.theta0);
    manual.global = manual.prev_global;
    manual.duals = manual.prev_duals;
    manual.duals_box = manual.prev_duals_box;
    manual.z = manual.prev_z;
    const int N = p.num_agents();
    std::vector<Vector> fused(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n)
      fused[static_cast<size_t>(n)] =
          fuse_local(payloads[static_cast<size_t>(n)].theta_rls,
                     admm_correction(payloads[static_cast<size_t>(n)].phi, manual, n));
    if (p.mode.is_constrained()) {
      for (int n = 0; n < N; ++n) {
        const auto idx = static_cast<size_t>(n);
        manual.z[idx] = project_box(fused[idx] + manual.duals_box[idx] / p.penalties.rho1,
                                    p.mode.box(n).lo, p.mode.box(n).hi);
      }
    }
    const double rho_c = p.penalties.consensus_weight(p.mode);
    const Vector g = global_update(fused, manual.duals, rho_c, p.mode);
    if (p.mode.is_constrained())
      manual.duals_box = dual_update_box(manual.duals_box, fused, manual.z, p.penalties.rho1);
    manual.duals = dual_update(manual.duals, fused, g, rho_c, p.mode);

    const CloudStepResult step = cloud_iterate(cloud, payloads, p.settings);
    CHECK(step.iterations == 1);
    CHECK(max_abs_diff(step.global, g) < 1e-14);
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      CHECK(max_abs_diff(step.fused[idx], fused[idx]) < 1e-14);
      CHECK(max_abs_diff(cloud.duals[idx], manual.duals[idx]) < 1e-14);
      if (p.mode.is_constrained())
        CHECK(max_abs_diff(cloud.z[idx], manual.z[idx]) < 1e-14);
    }
  }
}

TEST_CASE("recursive fused estimates equal the direct closed form") {
  Rng rng(41);
  for (int trial = 0; trial < 90; ++trial) {
    const auto variant = static_cast<ConsensusVariant>(trial % 3);
    const OracleProblem p = random_problem(rng, variant, 3, 8, 3, 1);
    const LibraryRun lib = drive_library(p);
    const OracleRun ref = reference_run(p);
    for (int n = 0; n < p.num_agents(); ++n) {
      CHECK(max_abs_diff(lib.fused[static_cast<size_t>(n)],
                         ref.fused[static_cast<size_t>(n)]) < 1e-8);
      CHECK(max_abs_diff(lib.duals[static_cast<size_t>(n)],
                         ref.duals[static_cast<size_t>(n)]) < 1e-8);
    }
    CHECK(max_abs_diff(lib.theta_g, ref.theta_g) < 1e-8);
  }
}

TEST_CASE("closed form matches the plain penalty-regularized expressions") {
  // With phi(0) = B^-1 and consistent initial estimates, the direct matrix
  // is exactly (sum lambda^(T-tau) X X' + B)^-1 with no initial-condition
  // carry, so the recursion reproduces the textbook closed form.
  Rng rng(43);

  SUBCASE("full mode") {
    OracleProblem p = random_problem(rng, ConsensusVariant::Full, 2, 6, 3, 1);
    const int d = p.mode.n_theta();
    const Matrix B = penalty_block(p.mode, p.penalties);
    p.phi0 = std::vector<Matrix>(static_cast<size_t>(p.num_agents()), B.inverse());
    for (auto& th : p.theta0) th = B.inverse() * (p.penalties.rho * p.theta_g0);

    const LibraryRun lib = drive_library(p);
    // final-step check against the literal expression
    const int T = p.horizon();
    for (int n = 0; n < p.num_agents(); ++n) {
      const double lambda = p.lambdas[static_cast<size_t>(n)];
      Matrix info = B;
      Vector data = Vector::Zero(d);
      for (int tau = 1; tau <= T; ++tau) {
        const Sample& s = p.samples[static_cast<size_t>(n)][static_cast<size_t>(tau - 1)];
        info += std::pow(lambda, T - tau) * s.X * s.X.transpose();
        data += std::pow(lambda, T - tau) * s.X * s.y;
      }
      CHECK(max_abs_diff(direct_phi(p, n, T), info.inverse()) < 1e-10);
      CHECK(max_abs_diff(direct_data_term(p, n, T), data) < 1e-10);
    }
    const OracleRun ref = reference_run(p);
    CHECK(max_abs_diff(lib.theta_g, ref.theta_g) < 1e-8);
  }

  SUBCASE("constrained mode") {
    OracleProblem p = random_problem(rng, ConsensusVariant::ConstrainedPartial, 2, 6, 3, 1);
    const Matrix B = penalty_block(p.mode, p.penalties);
    p.phi0 = std::vector<Matrix>(static_cast<size_t>(p.num_agents()), B.inverse());
    // theta0 inside its box with P theta0 = theta_g0 keeps the carry at zero
    for (int n = 0; n < p.num_agents(); ++n) {
      const auto& box = p.mode.box(n);
      Vector th = 0.5 * (box.lo + box.hi);
      p.theta0[static_cast<size_t>(n)] = th;
    }
    p.theta_g0 = p.mode.P() * p.theta0[0];
    for (auto& th : p.theta0) th = p.theta0[0];

    Vector carry = B * p.theta0[0] -
                   (p.penalties.rho1 * p.theta0[0] +
                    p.mode.P().transpose() * (p.penalties.rho2 * p.theta_g0));
    REQUIRE(carry.cwiseAbs().maxCoeff() < 1e-12);

    const LibraryRun lib = drive_library(p);
    const OracleRun ref = reference_run(p);
    CHECK(max_abs_diff(lib.theta_g, ref.theta_g) < 1e-8);
  }
}

TEST_CASE("single agent converges to its own estimate") {
  Rng rng(47);
  OracleProblem p = random_problem(rng, ConsensusVariant::Full, 1, 6, 2, 1);
  p.settings.max_iters = 500;
  p.settings.primal_tol = 1e-12;
  const LibraryRun lib = drive_library(p);
  const int T = p.horizon();
  CHECK((lib.theta_g.col(T - 1) - lib.fused[0].col(T - 1)).norm() <= 1e-6);
}

TEST_CASE("partial mode with P = I reproduces full mode exactly") {
  Rng rng(53);
  OracleProblem full = random_problem(rng, ConsensusVariant::Full, 3, 8, 3, 1);
  OracleProblem partial = full;
  partial.mode = ConsensusMode::partial(Matrix::Identity(full.mode.n_theta(),
                                                         full.mode.n_theta()));
  const LibraryRun a = drive_library(full);
  const LibraryRun b = drive_library(partial);
  CHECK(max_abs_diff(a.theta_g, b.theta_g) < 1e-10);
  for (int n = 0; n < full.num_agents(); ++n) {
    CHECK(max_abs_diff(a.fused[static_cast<size_t>(n)], b.fused[static_cast<size_t>(n)]) <
          1e-10);
    CHECK(max_abs_diff(a.duals[static_cast<size_t>(n)], b.duals[static_cast<size_t>(n)]) <
          1e-10);
  }
}

TEST_CASE("consensus residual drops below tolerance on static noise-free data") {
  Rng rng(59);
  const int N = 4, T = 30, d = 2;
  OracleProblem p;
  p.mode = ConsensusMode::full(d);
  p.penalties.rho = 1.0;
  p.lambdas.assign(N, 1.0);
  p.gamma = 1.0;  // matches the penalty so the coupling contracts quickly
  p.theta_g0 = vec({0.0, 0.0});
  p.settings.max_iters = 3000;
  p.settings.primal_tol = 1e-8;
  const Vector truth = vec({0.9, 0.4});
  p.samples.resize(N);
  p.theta0.assign(N, vec({0.0, 0.0}));
  for (int n = 0; n < N; ++n) {
    double y_prev = 0.0;
    for (int t = 1; t <= T; ++t) {
      Sample s;
      s.t = t;
      s.X.resize(d, 1);
      s.X << y_prev, rng.uniform(2.0, 3.0);
      const double y = s.X.col(0).dot(truth);
      s.y = Vector::Constant(1, y);
      p.samples[static_cast<size_t>(n)].push_back(s);
      y_prev = y;
    }
  }

  CloudState cloud = CloudState::init(p.mode, p.penalties, p.lambdas, p.theta_g0, p.theta0);
  std::vector<RlsState> agents(static_cast<size_t>(N));
  for (int n = 0; n < N; ++n) {
    agents[static_cast<size_t>(n)].theta = p.theta0[static_cast<size_t>(n)];
    agents[static_cast<size_t>(n)].phi = p.initial_phi(n);
    agents[static_cast<size_t>(n)].lambda = 1.0;
  }
  std::vector<Vector> feedback = p.theta0;
  std::vector<AgentPayload> payloads(static_cast<size_t>(N));
  for (int t = 1; t <= T; ++t) {
    for (int n = 0; n < N; ++n) {
      const auto idx = static_cast<size_t>(n);
      const ExtendedSample ext =
          extend_sample(p.samples[idx][static_cast<size_t>(t - 1)], p.mode, 1.0, p.penalties);
      GainUpdate g = gain_update(agents[idx], ext);
      agents[idx].phi = g.phi_new;
      agents[idx].theta = local_rls_update(g.K, ext, feedback[idx]);
      payloads[idx] = {agents[idx].theta, agents[idx].phi};
    }
    const CloudStepResult step = cloud_iterate(cloud, payloads, p.settings);
    if (step.converged) {
      CHECK(step.primal_residual <= p.settings.primal_tol);
      // dual feasibility settles along with the primal residual
      CHECK(step.global_change < 1e-6);
    }
    for (int n = 0; n < N; ++n) feedback[static_cast<size_t>(n)] = step.fused[static_cast<size_t>(n)];
    if (t == T) CHECK(step.converged);
  }
}

TEST_CASE("constrained iterates keep z inside the box exactly") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    OracleProblem p = random_problem(rng, ConsensusVariant::ConstrainedPartial, 3, 6, 3, 1);
    CloudState cloud = CloudState::init(p.mode, p.penalties, p.lambdas, p.theta_g0, p.theta0);
    std::vector<AgentPayload> payloads(static_cast<size_t>(p.num_agents()));
    for (int n = 0; n < p.num_agents(); ++n) {
      payloads[static_cast<size_t>(n)].phi = random_spd(rng, p.mode.n_theta());
      payloads[static_cast<size_t>(n)].theta_rls = p.theta0[static_cast<size_t>(n)];
    }
    cloud_iterate(cloud, payloads, p.settings);
    for (int n = 0; n < p.num_agents(); ++n) {
      const auto& box = p.mode.box(n);
      const Vector& z = cloud.z[static_cast<size_t>(n)];
      for (int i = 0; i < z.size(); ++i) {
        CHECK(z[i] >= box.lo[i]);
        CHECK(z[i] <= box.hi[i]);
      }
    }
  }
}
