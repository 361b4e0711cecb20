#include "subtrace/coord.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace subtrace {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kDegenerateLimit = 89.9 * kDegToRad;

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

OrientationAngles OrientationAngles::from_degrees(const Vec3& deg) {
    return {deg[0] * kDegToRad, deg[1] * kDegToRad, deg[2] * kDegToRad};
}

Vec3 OrientationAngles::to_degrees() const {
    return {alpha / kDegToRad, beta / kDegToRad, gamma / kDegToRad};
}

bool OrientationAngles::consistent(double tol) const {
    const double sa = std::sin(alpha);
    const double sb = std::sin(beta);
    return sa * sa + sb * sb <= 1.0 + tol;
}

bool OrientationAngles::degenerate() const {
    return std::abs(alpha) > kDegenerateLimit && std::abs(beta) > kDegenerateLimit;
}

Rotation rotation_from(const OrientationAngles& o) {
    const double sa = std::sin(o.alpha), ca = std::cos(o.alpha);
    const double sg = std::sin(o.gamma), cg = std::cos(o.gamma);

    const Vec3 y{ca * sg, ca * cg, sa};
    // Orthonormal basis of the plane perpendicular to Y: e1 is horizontal,
    // e2 = e1 x Y has vertical component cos(alpha).
    const Vec3 e1{cg, -sg, 0.0};
    const Vec3 e2 = cross(e1, y);

    // X = cos(rho) e1 + sin(rho) e2 with elevation sin(rho) cos(alpha) = sin(beta).
    // cos^2(rho) is factored so a near-vertical screen does not cancel.
    const double sb = std::sin(o.beta);
    double srho = ca > 1e-12 ? sb / ca : 0.0;
    srho = std::clamp(srho, -1.0, 1.0);
    double crho = ca > 1e-12 ? std::sqrt(std::max(0.0, (ca - sb) * (ca + sb))) / ca : 1.0;
    if (std::cos(o.beta) < 0.0) crho = -crho;

    const Vec3 x{crho * e1[0] + srho * e2[0], crho * e1[1] + srho * e2[1],
                 crho * e1[2] + srho * e2[2]};
    const Vec3 z = cross(x, y);

    Rotation r{};
    for (int i = 0; i < 3; ++i) {
        r[i][0] = x[i];
        r[i][1] = y[i];
        r[i][2] = z[i];
    }
    return r;
}

Vec3 rotate(const Rotation& r, const Vec3& v) {
    Vec3 out{};
    for (int i = 0; i < 3; ++i) out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
    return out;
}

Vec3 rotate_inverse(const Rotation& r, const Vec3& v) {
    Vec3 out{};
    for (int j = 0; j < 3; ++j) out[j] = r[0][j] * v[0] + r[1][j] * v[1] + r[2][j] * v[2];
    return out;
}

namespace {

EnuSample rotate_sample(const Rotation& r, const SensorSample& s) {
    const Vec3 w = rotate(r, s.acc);
    EnuSample e;
    e.t = s.t;
    e.eca = w[0];
    e.nca = w[1];
    e.vca = w[2] - kGravity;
    e.hra = std::hypot(e.eca, e.nca);
    return e;
}

}  // namespace

EnuSample to_enu(const SensorSample& sample) {
    return rotate_sample(rotation_from(OrientationAngles::from_degrees(sample.orient)), sample);
}

EnuSeries to_enu(std::span<const SensorSample> samples) {
    EnuSeries out;
    out.samples.reserve(samples.size());
    Rotation last{};
    bool have_last = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto o = OrientationAngles::from_degrees(samples[i].orient);
        Rotation r;
        if (o.degenerate() && have_last) {
            r = last;
            out.flagged.push_back(i);
        } else {
            if (o.degenerate()) out.flagged.push_back(i);
            r = rotation_from(o);
            last = r;
            have_last = true;
        }
        out.samples.push_back(rotate_sample(r, samples[i]));
    }
    return out;
}

std::vector<HraPoint> hra_series(std::span<const SensorSample> samples) {
    const auto enu = to_enu(samples);
    std::vector<HraPoint> out;
    out.reserve(enu.samples.size());
    for (const auto& e : enu.samples) out.push_back({e.t, e.hra});
    return out;
}

std::vector<double> hra_values(std::span<const EnuSample> enu) {
    std::vector<double> out;
    out.reserve(enu.size());
    for (const auto& e : enu) out.push_back(e.hra);
    return out;
}

}  // namespace subtrace
