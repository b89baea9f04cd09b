#pragma once

#include <span>
#include <vector>

#include "meshvf/types.hpp"

namespace meshvf {

class ZeroVelocityError : public Error {
 public:
  using Error::Error;
};

/// Spectral arc length of a uniformly sampled speed profile.
///
/// The speed is zero-padded to the next power of two at least 8x its length,
/// its magnitude spectrum normalised by the DC value, differentiated by
/// central differences and the arc length integrated by the trapezoid rule
/// over [0, cutoff_hz]. Throws ZeroVelocityError for an all-zero profile.
double spectral_arc_length(std::span<const double> speed, double sample_rate_hz, double cutoff_hz = 20.0);

/// Speed magnitudes from finite differences of consecutive positions.
std::vector<double> speed_profile(std::span<const Vector3d> positions, double sample_rate_hz);

/// Spectral arc length of a position trajectory; needs at least two samples.
double spectral_arc_length(std::span<const Vector3d> positions, double sample_rate_hz, double cutoff_hz = 20.0);

struct DeviationStats {
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
};

/// Lateral deviation of a trajectory from a planned polyline.
///
/// Each sample is projected onto its nearest path segment, giving an arc
/// length and a perpendicular distance. Distances are interpolated between
/// consecutive samples at every 1 mm station along the path, keeping the
/// largest value seen per station. Statistics use the population deviation.
/// Throws Error for a path shorter than two distinct points.
DeviationStats path_deviation(std::span<const Vector3d> trajectory, std::span<const Vector3d> path,
                              double station_spacing = 1.0);

}  // namespace meshvf
