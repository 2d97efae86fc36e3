#include <random>

#include <gtest/gtest.h>

#include "esgea/lanczos.hpp"
#include "esgea/synth.hpp"
#include "oracles.hpp"

using namespace esgea;

namespace {

DescriptorConfig extreme_config(std::size_t count) {
  DescriptorConfig c;
  c.approximation = ApproximationMode::extreme;
  c.extreme_count = count;
  return c;
}

// Exact interpolated reference computed from the dense spectrum.
std::vector<double> interpolated_reference(const std::vector<double>& ev, std::size_t count) {
  const std::size_t h = count / 2;
  std::vector<double> lo(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(h));
  std::vector<double> hi(ev.end() - static_cast<std::ptrdiff_t>(h), ev.end());
  return interpolate_interior(lo, hi, ev.size());
}

}  // namespace

TEST(BlockLanczos, FindsExtremesIncludingMultiplicities) {
  // Cycle eigenvalues are mostly double.
  const auto lap = build_laplacian(synth::cycle(80));
  const auto exact = eigendecompose(lap).eigenvalues;
  const auto ext = block_lanczos_extremes(lap.matrix, 10);
  ASSERT_TRUE(ext.converged);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(ext.lower[i], exact[i], 1e-8);
    EXPECT_NEAR(ext.upper[i], exact[exact.size() - 10 + i], 1e-8);
  }
}

TEST(BlockLanczos, RandomGraphs) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto lap = build_laplacian(oracle::random_graph(400, 0.05, rng));
    const auto exact = eigendecompose(lap).eigenvalues;
    const auto ext = block_lanczos_extremes(lap.matrix, 8);
    ASSERT_TRUE(ext.converged);
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_NEAR(std::max(0.0, ext.lower[i]), exact[i], 1e-7);
      EXPECT_NEAR(ext.upper[i], exact[exact.size() - 8 + i], 1e-7);
    }
  }
}

TEST(BlockLanczos, NonConvergenceFallsBackWithWarning) {
  const auto lap = build_laplacian(synth::gnp(300, 0.1, 4));
  LanczosOptions tight;
  tight.max_basis_factor = 1;
  tight.min_extra_basis = 0;
  tight.residual_tolerance = 1e-15;
  std::vector<std::string> warnings;
  auto saved = warning_sink();
  warning_sink() = [&](const std::string& m) { warnings.push_back(m); };
  const auto approx = approx_spectrum(lap, 20, tight);
  warning_sink() = saved;
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(approx.eigenvalues, eigendecompose(lap).eigenvalues);
}

TEST(InterpolateInterior, SpacingAndEndpoints) {
  const auto s = interpolate_interior({0.0, 1.0}, {4.0, 5.0}, 7);
  const std::vector<double> want = {0, 1, 1.75, 2.5, 3.25, 4, 5};
  ASSERT_EQ(s.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(s[i], want[i], 1e-15);
  EXPECT_EQ(interpolate_interior({0.0}, {3.0}, 2), (std::vector<double>{0.0, 3.0}));
  EXPECT_THROW(interpolate_interior({0.0, 1.0}, {3.0}, 5), InvalidArgument);
}

TEST(ApproxTrace, SmallMatrixIsExact) {
  const auto lap = build_laplacian(synth::gnp(18, 0.3, 1));
  const auto cfg = extreme_config(20);
  EXPECT_EQ(approx_trace(lap, cfg).values, heat_trace(eigendecompose(lap), cfg.grid).values);
}

TEST(ApproxTrace, Cycle50WithinFivePercent) {
  const auto lap = build_laplacian(synth::cycle(50));
  const auto cfg = extreme_config(20);
  const auto exact = heat_trace(eigendecompose(lap), TimeGrid({1.0})).values[0];
  DescriptorConfig at_one = cfg;
  at_one.grid = TimeGrid({1.0});
  const auto approx = approx_trace(lap, at_one).values[0];
  EXPECT_LT(std::abs(approx - exact) / exact, 0.05);
}

TEST(ApproxTrace, MatchesInterpolationOfExactSpectrum) {
  const auto lap = build_laplacian(synth::gnp(120, 0.1, 2));
  const auto cfg = extreme_config(20);
  const auto reference = interpolated_reference(eigendecompose(lap).eigenvalues, 20);
  SpectralDecomposition ref;
  ref.eigenvalues = reference;
  const auto want = heat_trace(ref, cfg.grid).values;
  const auto got = approx_trace(lap, cfg).values;
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-7 * want[i]);
}

TEST(ApproxTrace, SmallTLimitIsNodeCount) {
  const auto lap = build_laplacian(synth::gnp(100, 0.2, 3));
  auto cfg = extreme_config(20);
  cfg.grid = TimeGrid({1e-12});
  EXPECT_NEAR(approx_trace(lap, cfg).values[0], 100.0, 1e-8);
}

TEST(ApproxTrace, RejectsOddCount) {
  const auto lap = build_laplacian(synth::cycle(50));
  EXPECT_THROW(approx_spectrum(lap, 7), InvalidArgument);
}
