#include "mhdm/blind.hpp"
#include "mhdm/degrade.hpp"
#include "mhdm/errors.hpp"
#include "mhdm/metrics.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace mhdm;

namespace {

struct Scene {
  Image u;
  Image k;
  Image f;
  double delta = 0.0;
};

Scene make_scene(double noise_var, std::uint64_t seed = 7) {
  Scene s;
  s.u = testing_support::synthetic_scene(32, 32);
  s.k = gaussian_kernel(32, 32, 2.0);
  const Degraded d = degrade(s.u, s.k, noise_var, seed);
  s.f = d.observation;
  s.delta = d.delta;
  return s;
}

// Right-hand side of the residual estimate, in the spatial units of the
// stored residuals: 4 (lambda0 J1(U) + mu0 J2(K)) / (mn (n + 1)).
double residual_bound(const Scene& s, const RunConfig& cfg, std::size_t n) {
  const double j1 = sobolev_norm_sq(forward_dft(s.u), sobolev_weights(32, 32, cfg.r));
  const double j2 = sobolev_norm_sq(forward_dft(s.k), sobolev_weights(32, 32, cfg.s));
  return 4.0 * (cfg.lambda0 * j1 + cfg.mu0 * j2) / (32.0 * 32.0 * static_cast<double>(n + 1));
}

} // namespace

TEST(DiscrepancyIndex, Examples) {
  const std::vector<double> r{10.0, 5.0, 0.5};
  EXPECT_EQ(discrepancy_index(r, 1.0), std::optional<std::size_t>(2));
  EXPECT_EQ(discrepancy_index(r, 20.0), std::optional<std::size_t>(0));
  EXPECT_EQ(discrepancy_index(r, 20.0, 1), std::optional<std::size_t>(1));
  EXPECT_FALSE(discrepancy_index(r, 0.1).has_value());
  EXPECT_FALSE(discrepancy_index(std::vector<double>{}, 1.0).has_value());
}

TEST(RunConfig, DefaultsAndValidation) {
  RunConfig cfg;
  EXPECT_EQ(cfg.r, 1.0);
  EXPECT_EQ(cfg.s, 0.1);
  EXPECT_EQ(cfg.lambda0, 1.4e-4);
  EXPECT_EQ(cfg.mu0, 6.3e5);
  EXPECT_EQ(cfg.decay, 4.0);
  EXPECT_DOUBLE_EQ(cfg.tau * cfg.tau, 1.001);
  EXPECT_NO_THROW(cfg.validate());

  auto invalid = [](auto edit) {
    RunConfig c;
    edit(c);
    EXPECT_THROW(c.validate(), InvalidArgument);
  };
  invalid([](RunConfig& c) { c.r = -1.0; });
  invalid([](RunConfig& c) { c.s = std::nan(""); });
  invalid([](RunConfig& c) { c.lambda0 = 0.0; });
  invalid([](RunConfig& c) { c.mu0 = -2.0; });
  invalid([](RunConfig& c) { c.decay = 1.0; });
  invalid([](RunConfig& c) { c.tau = 1.0; });
  invalid([](RunConfig& c) { c.delta = -1.0; });
  invalid([](RunConfig& c) { c.max_iter = 0; });
}

TEST(RunBlind, NoiseFreeResidualDecreasesWithinBound) {
  const Scene s = make_scene(0.0);
  RunConfig cfg;
  cfg.max_iter = 20;
  const MhdmState st = run_blind(s.f, cfg);
  ASSERT_EQ(st.n, 21u);
  EXPECT_EQ(st.stop_reason, StopReason::MaxIter);
  for (std::size_t n = 0; n < st.n; ++n) {
    if (n > 0) {
      EXPECT_LE(st.residuals[n], st.residuals[n - 1] + 1e-12) << n;
    }
    EXPECT_LE(st.residuals[n], residual_bound(s, cfg, n)) << n;
    EXPECT_DOUBLE_EQ(st.lambdas[n], cfg.lambda0 / std::pow(4.0, static_cast<double>(n)));
    EXPECT_DOUBLE_EQ(st.mus[n], cfg.mu0 / std::pow(4.0, static_cast<double>(n)));
  }
}

TEST(RunBlind, NoisyResidualBoundAndStop) {
  const Scene s = make_scene(4e-4);
  RunConfig cfg;
  cfg.delta = s.delta;
  const MhdmState st = run_blind(s.f, cfg);
  ASSERT_EQ(st.stop_reason, StopReason::Discrepancy);
  EXPECT_LE(st.stop_index(), 30u);
  EXPECT_LE(st.residuals.back(), cfg.threshold());
  for (std::size_t n = 0; n + 1 < st.n; ++n) EXPECT_GT(st.residuals[n], cfg.threshold());
  for (std::size_t n = 0; n < st.n; ++n) {
    EXPECT_LE(st.residuals[n], residual_bound(s, cfg, n) + s.delta * s.delta) << n;
  }
}

TEST(RunBlind, DefaultsImproveOnSyntheticScene) {
  const Scene s = make_scene(4e-4);
  RunConfig cfg;
  cfg.delta = s.delta;
  const MhdmState st = run_blind(s.f, cfg);
  const auto [u, k] = reconstruct(st, st.stop_index());
  EXPECT_GT(psnr(u, s.u), psnr(s.f, s.u))
      << "default weights balance image and kernel for ~512x512 inputs; see the grid-size scaled run below";
}

TEST(RunBlind, GridScaledRatioImprovesOnSyntheticScene) {
  // Spectral magnitudes grow with the pixel count, so the weight ratio that
  // balances image and kernel scales like (grid side)^-4.
  const Scene s = make_scene(4e-4);
  RunConfig cfg;
  cfg.delta = s.delta;
  cfg.mu0 = cfg.mu0 * std::pow(32.0 / 512.0, 4.0);
  const MhdmState st = run_blind(s.f, cfg);
  const auto [u, k] = reconstruct(st, st.stop_index());
  EXPECT_GT(psnr(u, s.u), psnr(s.f, s.u));
  EXPECT_LT(rel_l2_error(k, s.k), 1.0);
}

TEST(RunBlind, ConstraintsAtEveryIterate) {
  const Scene s = make_scene(4e-4);
  RunConfig cfg;
  cfg.delta = s.delta;
  cfg.max_iter = 8;
  cfg.min_iter = 8;
  const MhdmState st = run_blind(s.f, cfg);
  const double f_sum = s.f.sum();
  for (std::size_t n = 0; n < st.n; ++n) {
    const auto [u, k] = reconstruct(st, n);
    EXPECT_NEAR(k.sum(), 1.0, 1e-12);
    EXPECT_NEAR(u.sum(), f_sum, 1e-10 * std::abs(f_sum));
    Spectrum kh = st.scales_k[0];
    for (std::size_t i = 1; i <= n; ++i) kh += st.scales_k[i];
    for (const Complex& c : kh.values()) {
      EXPECT_GE(c.real(), -1e-9);
      EXPECT_EQ(c.imag(), 0.0);
    }
    for (std::size_t i = 0; i < 32; ++i) {
      for (std::size_t j = 0; j < 32; ++j) {
        EXPECT_NEAR(k(i, j), k(mirror_index(i, 32), mirror_index(j, 32)), 1e-12);
        EXPECT_LE(std::abs(k(i, j)), k(0, 0) + 1e-9);
      }
    }
  }
}

TEST(RunBlind, UnpinnedRunStillDecreases) {
  const Scene s = make_scene(0.0);
  RunConfig cfg;
  cfg.pin_means = false;
  cfg.max_iter = 6;
  const MhdmState st = run_blind(s.f, cfg);
  for (std::size_t n = 1; n < st.n; ++n) EXPECT_LE(st.residuals[n], st.residuals[n - 1] + 1e-12);
}

TEST(RunBlind, MinIterDelaysStop) {
  const Scene s = make_scene(4e-4);
  RunConfig cfg;
  cfg.delta = s.delta;
  const std::size_t free_stop = run_blind(s.f, cfg).stop_index();
  cfg.min_iter = free_stop + 3;
  const MhdmState st = run_blind(s.f, cfg);
  EXPECT_EQ(st.stop_index(), free_stop + 3);
  EXPECT_EQ(st.stop_reason, StopReason::Discrepancy);
}

TEST(RunBlind, ScaleParameterRobustness) {
  const Scene s = make_scene(4e-4);
  for (double scale : {1.0, 10.0}) {
    RunConfig cfg;
    cfg.delta = s.delta;
    cfg.lambda0 *= scale;
    cfg.mu0 *= scale;
    const MhdmState st = run_blind(s.f, cfg);
    EXPECT_EQ(st.stop_reason, StopReason::Discrepancy);
    const auto [u, k] = reconstruct(st, st.stop_index());
    EXPECT_TRUE(std::isfinite(psnr(u, s.u)));
  }
}

TEST(RunBlind, ScheduleFloorEndsRun) {
  const Scene s = make_scene(0.0);
  RunConfig cfg;
  cfg.decay = 1e6;
  cfg.max_iter = 30;
  const MhdmState st = run_blind(s.f, cfg);
  EXPECT_EQ(st.n, 4u); // 1e6^3 = 1e18 is the last admissible shrink
  EXPECT_EQ(st.stop_reason, StopReason::MaxIter);
}

TEST(RunBlind, RejectsBadInput) {
  Image f(4, 4, 1.0);
  f(1, 1) = std::nan("");
  EXPECT_THROW(run_blind(f, RunConfig{}), InvalidArgument);
  EXPECT_THROW(run_blind(Image{}, RunConfig{}), InvalidArgument);
}

TEST(Reconstruct, PartialSumsAndResiduals) {
  const Scene s = make_scene(4e-4);
  RunConfig cfg;
  cfg.max_iter = 6;
  const MhdmState st = run_blind(s.f, cfg);

  const auto [u0, k0] = reconstruct(st, 0);
  EXPECT_LT(testing_support::max_abs_diff(u0, inverse_dft(st.scales_u[0])), 1e-12);

  const auto [u, k] = reconstruct(st, st.n - 1);
  EXPECT_LT(testing_support::max_abs_diff(u, inverse_dft(st.U_hat)), 1e-10);
  EXPECT_LT(testing_support::max_abs_diff(k, inverse_dft(st.K_hat)), 1e-10);

  for (std::size_t n = 0; n < st.n; ++n) {
    const auto [un, kn] = reconstruct(st, n);
    const double direct = testing_support::squared_distance(circular_convolve(un, kn), s.f);
    EXPECT_NEAR(direct, st.residuals[n], 1e-9 * (1.0 + st.residuals[n])) << n;
  }
  EXPECT_THROW(reconstruct(st, st.n), IndexOutOfRange);
}

TEST(StopReasonNames, ToString) {
  EXPECT_EQ(to_string(StopReason::Discrepancy), "discrepancy");
  EXPECT_EQ(to_string(StopReason::MaxIter), "max_iter");
}
