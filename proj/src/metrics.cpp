#include "meshvf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <unsupported/Eigen/FFT>

namespace meshvf {

double spectral_arc_length(std::span<const double> speed, double sample_rate_hz, double cutoff_hz) {
  if (speed.empty()) throw Error("spectral arc length needs at least one speed sample");
  if (!(sample_rate_hz > 0.0) || !(cutoff_hz > 0.0)) throw Error("sample rate and cutoff must be positive");

  std::size_t m = 1;
  while (m < 8 * speed.size()) m *= 2;
  std::vector<double> padded(m, 0.0);
  std::copy(speed.begin(), speed.end(), padded.begin());
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, padded);

  const double dc = std::abs(spectrum[0]);
  if (dc == 0.0) throw ZeroVelocityError("trajectory is stationary");

  const double df = sample_rate_hz / static_cast<double>(m);
  std::vector<double> freq;
  std::vector<double> mag;
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double f = df * static_cast<double>(k);
    if (f > cutoff_hz) break;
    freq.push_back(f);
    mag.push_back(std::abs(spectrum[k]) / dc);
  }
  const std::size_t n = mag.size();
  if (n < 2) return -1.0;  // the band holds only DC: the arc is the flat segment

  std::vector<double> slope(n);
  slope[0] = (mag[1] - mag[0]) / (freq[1] - freq[0]);
  slope[n - 1] = (mag[n - 1] - mag[n - 2]) / (freq[n - 1] - freq[n - 2]);
  for (std::size_t k = 1; k + 1 < n; ++k) slope[k] = (mag[k + 1] - mag[k - 1]) / (freq[k + 1] - freq[k - 1]);

  const double a = 1.0 / cutoff_hz;
  double arc = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double y0 = std::sqrt(a * a + slope[k] * slope[k]);
    const double y1 = std::sqrt(a * a + slope[k + 1] * slope[k + 1]);
    arc += 0.5 * (y0 + y1) * (freq[k + 1] - freq[k]);
  }
  return -arc;
}

std::vector<double> speed_profile(std::span<const Vector3d> positions, double sample_rate_hz) {
  std::vector<double> speed;
  if (positions.size() < 2) return speed;
  speed.reserve(positions.size() - 1);
  for (std::size_t k = 0; k + 1 < positions.size(); ++k)
    speed.push_back((positions[k + 1] - positions[k]).norm() * sample_rate_hz);
  return speed;
}

double spectral_arc_length(std::span<const Vector3d> positions, double sample_rate_hz, double cutoff_hz) {
  if (positions.size() < 2) throw Error("spectral arc length needs at least two samples");
  const auto speed = speed_profile(positions, sample_rate_hz);
  return spectral_arc_length(std::span<const double>(speed), sample_rate_hz, cutoff_hz);
}

namespace {

struct Projection {
  double s = 0.0;
  double distance = 0.0;
};

Projection project(const Vector3d& p, std::span<const Vector3d> path, const std::vector<double>& cumulative) {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Vector3d seg = path[i + 1] - path[i];
    const double len2 = seg.squaredNorm();
    if (len2 == 0.0) continue;
    const double u = std::clamp((p - path[i]).dot(seg) / len2, 0.0, 1.0);
    const double d = (p - (path[i] + u * seg)).norm();
    if (d < best.distance) best = {cumulative[i] + u * std::sqrt(len2), d};
  }
  return best;
}

}  // namespace

DeviationStats path_deviation(std::span<const Vector3d> trajectory, std::span<const Vector3d> path,
                              double station_spacing) {
  if (path.size() < 2) throw Error("planned path needs at least two points");
  if (!(station_spacing > 0.0)) throw Error("station spacing must be positive");
  std::vector<double> cumulative(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) cumulative[i] = cumulative[i - 1] + (path[i] - path[i - 1]).norm();
  const double length = cumulative.back();
  if (!(length > 0.0)) throw Error("planned path has zero length");
  if (trajectory.empty()) return {};

  std::vector<Projection> proj;
  proj.reserve(trajectory.size());
  for (const Vector3d& p : trajectory) proj.push_back(project(p, path, cumulative));

  const auto stations = static_cast<std::size_t>(std::floor(length / station_spacing)) + 1;
  std::vector<double> worst(stations, -1.0);
  for (std::size_t k = 0; k + 1 < proj.size(); ++k) {
    const Projection& a = proj[k];
    const Projection& b = proj[k + 1];
    const double lo = std::min(a.s, b.s);
    const double hi = std::max(a.s, b.s);
    const auto first = static_cast<std::size_t>(std::ceil(lo / station_spacing));
    for (std::size_t j = first; j < stations && station_spacing * static_cast<double>(j) <= hi; ++j) {
      const double s = station_spacing * static_cast<double>(j);
      const double w = hi > lo ? (s - a.s) / (b.s - a.s) : 0.0;
      worst[j] = std::max(worst[j], a.distance + w * (b.distance - a.distance));
    }
  }

  std::vector<double> values;
  for (double v : worst)
    if (v >= 0.0) values.push_back(v);
  if (values.empty())
    for (const Projection& p : proj) values.push_back(p.distance);

  DeviationStats out;
  for (double v : values) {
    out.mean += v;
    out.max = std::max(out.max, v);
  }
  out.mean /= static_cast<double>(values.size());
  for (double v : values) out.std += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(out.std / static_cast<double>(values.size()));
  return out;
}

}  // namespace meshvf
