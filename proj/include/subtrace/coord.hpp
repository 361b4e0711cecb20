#pragma once

// Phone screen frame -> static East-North-Up frame.
//
// Orientation angles follow the orientation-sensor convention:
//   alpha  elevation of the phone Y axis above the horizontal plane
//   beta   elevation of the phone X axis above the horizontal plane; |beta| > 90
//          means X points to the left of Y's horizontal heading (screen down)
//   gamma  heading of the horizontal projection of Y, clockwise from north
// The phone axes are orthonormal, so the Z tilt theta is implied by
// sin^2(alpha) + sin^2(beta) + sin^2(theta) = 1.

#include <array>
#include <span>
#include <vector>

#include "subtrace/model.hpp"

namespace subtrace {

struct OrientationAngles {
    double alpha = 0.0;  // radians
    double beta = 0.0;
    double gamma = 0.0;

    static OrientationAngles from_degrees(const Vec3& deg);
    Vec3 to_degrees() const;
    bool consistent(double tol = 1e-9) const;
    bool degenerate() const;
};

/// Columns are the phone X, Y, Z axes expressed in ENU coordinates.
using Rotation = std::array<std::array<double, 3>, 3>;

Rotation rotation_from(const OrientationAngles& o);
Vec3 rotate(const Rotation& r, const Vec3& v);
Vec3 rotate_inverse(const Rotation& r, const Vec3& v);

/// Single-sample transform; gravity removed from the up component.
EnuSample to_enu(const SensorSample& sample);

struct EnuSeries {
    std::vector<EnuSample> samples;
    /// Indices whose orientation was degenerate and reused the previous rotation.
    std::vector<std::size_t> flagged;
};

/// Whole-trace transform with carry-forward of the last good rotation for
/// degenerate orientations.
EnuSeries to_enu(std::span<const SensorSample> samples);

struct HraPoint {
    double t = 0.0;
    double hra = 0.0;
};

std::vector<HraPoint> hra_series(std::span<const SensorSample> samples);

/// HRA values only, from an ENU series.
std::vector<double> hra_values(std::span<const EnuSample> enu);

}  // namespace subtrace
