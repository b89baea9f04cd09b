#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "meshvf/metrics.hpp"

using namespace meshvf;

namespace {

// Direct DFT over the in-band bins only; no FFT library involved.
double naive_sal(const std::vector<double>& speed, double fs, double cutoff) {
  std::size_t m = 1;
  while (m < 8 * speed.size()) m *= 2;
  const double df = fs / static_cast<double>(m);
  std::vector<double> f, mag;
  for (std::size_t k = 0; df * static_cast<double>(k) <= cutoff; ++k) {
    std::complex<double> sum = 0.0;
    for (std::size_t n = 0; n < speed.size(); ++n)
      sum += speed[n] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * n % m) / static_cast<double>(m));
    f.push_back(df * static_cast<double>(k));
    mag.push_back(std::abs(sum));
  }
  const double dc = mag.front();
  for (double& v : mag) v /= dc;
  if (f.size() < 2) return -1.0;
  const std::size_t n = f.size();
  double arc = 0.0;
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == n ? k : k + 1;
    g[k] = (mag[hi] - mag[lo]) / (f[hi] - f[lo]);
  }
  for (std::size_t k = 0; k + 1 < n; ++k)
    arc += 0.5 * (std::hypot(1.0 / cutoff, g[k]) + std::hypot(1.0 / cutoff, g[k + 1])) * (f[k + 1] - f[k]);
  return -arc;
}

std::vector<double> min_jerk_speed(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    v[i] = 30 * t * t * (1 - t) * (1 - t);
  }
  return v;
}

}  // namespace

TEST(SpectralArcLength, ConstantSpeedFrozenValue) {
  // Reference from an independent NumPy evaluation of the same discretisation.
  const std::vector<double> speed(10000, 1.0);
  EXPECT_NEAR(spectral_arc_length(speed, 1000.0), -4.297785735308869, 1e-9);
}

TEST(SpectralArcLength, MatchesDirectDft) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> speed = min_jerk_speed(800 + 300 * trial);
    for (double& v : speed) v += 0.1 * u(rng);
    const double fs = 200.0 + 100.0 * trial;
    EXPECT_NEAR(spectral_arc_length(speed, fs), naive_sal(speed, fs, 20.0), 1e-9) << trial;
  }
}

TEST(SpectralArcLength, NoiseAtFifteenHertzLowersScore) {
  const double fs = 1000.0;
  std::vector<double> clean(10000, 1.0);
  std::vector<double> noisy = clean;
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += 0.2 * std::sin(2 * M_PI * 15.0 * static_cast<double>(i) / fs);
  EXPECT_LT(spectral_arc_length(noisy, fs), spectral_arc_length(clean, fs));
}

// Holds for bell-shaped movement profiles. A constant-speed base is excluded:
// its rectangular-window sidelobes can interfere destructively with the noise.
TEST(SpectralArcLength, SubCutoffNoiseLowersBellProfileScore) {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> freq(1.0, 19.0);
  std::uniform_real_distribution<double> amp(0.05, 0.3);
  std::uniform_real_distribution<double> phase(0.0, 2 * M_PI);
  const double fs = 1000.0;
  const std::vector<double> base = min_jerk_speed(4000);
  const double clean = spectral_arc_length(base, fs);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> noisy = base;
    const int parts = 1 + trial % 3;
    for (int p = 0; p < parts; ++p) {
      const double f = freq(rng), a = amp(rng), ph = phase(rng);
      for (std::size_t i = 0; i < noisy.size(); ++i)
        noisy[i] += a * std::sin(2 * M_PI * f * static_cast<double>(i) / fs + ph);
    }
    EXPECT_LT(spectral_arc_length(noisy, fs), clean) << "trial " << trial;
  }
}

TEST(SpectralArcLength, Errors) {
  EXPECT_THROW(spectral_arc_length(std::vector<double>(100, 0.0), 1000.0), ZeroVelocityError);
  const std::vector<Vector3d> still(50, Vector3d(1, 2, 3));
  EXPECT_THROW(spectral_arc_length(still, 1000.0), ZeroVelocityError);
  EXPECT_THROW(spectral_arc_length(std::vector<Vector3d>{Vector3d::Zero()}, 1000.0), Error);
}

TEST(SpectralArcLength, PositionsUseFiniteDifferenceSpeed) {
  std::vector<Vector3d> line;
  for (int i = 0; i < 2001; ++i) line.emplace_back(0.01 * i, 0.0, 0.0);
  const auto speed = speed_profile(line, 1000.0);
  ASSERT_EQ(speed.size(), 2000u);
  EXPECT_NEAR(speed[17], 10.0, 1e-9);
  EXPECT_NEAR(spectral_arc_length(line, 1000.0), spectral_arc_length(std::vector<double>(2000, 10.0), 1000.0), 1e-12);
}

TEST(PathDeviation, IdenticalAndOffset) {
  const std::vector<Vector3d> path = {{0, 0, 0}, {50, 0, 0}, {50, 30, 0}};
  std::vector<Vector3d> traj;
  for (int i = 0; i <= 500; ++i) traj.emplace_back(0.1 * i, 0, 0);
  for (int i = 1; i <= 300; ++i) traj.emplace_back(50, 0.1 * i, 0);
  auto d = path_deviation(traj, path);
  EXPECT_NEAR(d.mean, 0.0, 1e-12);
  EXPECT_NEAR(d.std, 0.0, 1e-12);
  EXPECT_NEAR(d.max, 0.0, 1e-12);

  const std::vector<Vector3d> straight = {{0, 0, 0}, {100, 0, 0}};
  std::vector<Vector3d> shifted;
  for (int i = 0; i <= 1000; ++i) shifted.emplace_back(0.1 * i, 0.3, 0);
  d = path_deviation(shifted, straight);
  EXPECT_NEAR(d.mean, 0.3, 1e-12);
  EXPECT_NEAR(d.std, 0.0, 1e-12);
  EXPECT_NEAR(d.max, 0.3, 1e-12);
}

TEST(PathDeviation, SinusoidalWobble) {
  const double length = 1000.0;
  const double wavelength = 37.3;
  const std::vector<Vector3d> path = {{0, 0, 0}, {length, 0, 0}};
  std::vector<Vector3d> traj;
  for (int i = 0; i <= 100000; ++i) {
    const double s = length * i / 100000.0;
    traj.emplace_back(s, std::sin(2 * M_PI * s / wavelength), 0);
  }
  const auto d = path_deviation(traj, path);
  // Dense numerical average of |sin| over the same span.
  double dense = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) dense += std::abs(std::sin(2 * M_PI * (length * (i + 0.5) / n) / wavelength));
  dense /= n;
  EXPECT_NEAR(dense, 2 / M_PI, 2e-3);
  EXPECT_NEAR(d.mean, dense, 5e-3);
  EXPECT_NEAR(d.max, 1.0, 5e-3);
}

TEST(PathDeviation, Errors) {
  const std::vector<Vector3d> traj = {{0, 0, 0}};
  EXPECT_THROW(path_deviation(traj, std::vector<Vector3d>{{0, 0, 0}}), Error);
  EXPECT_THROW(path_deviation(traj, std::vector<Vector3d>{{1, 1, 1}, {1, 1, 1}}), Error);
}
