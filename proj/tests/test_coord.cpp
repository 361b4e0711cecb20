#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "subtrace/coord.hpp"
#include "subtrace/simgen.hpp"

using namespace subtrace;

TEST_SUITE("coord") {

TEST_CASE("matches the heading-pitch-roll composition oracle") {
    auto rng = make_rng(11);
    for (int i = 0; i < 20000; ++i) {
        const Vec3 angles = oracle::random_angles(rng);
        const SensorSample s{0.0, oracle::random_vec(rng, 15.0), angles};
        const auto e = to_enu(s);
        const auto want = oracle::frame_apply(oracle::composed_frame(angles), s.acc);
        CHECK(std::abs(e.eca - want[0]) <= 1e-9);
        CHECK(std::abs(e.nca - want[1]) <= 1e-9);
        CHECK(std::abs(e.vca + kGravity - want[2]) <= 1e-9);
    }
}

TEST_CASE("recovers random frames from their angles") {
    // Angles are read off uniformly random frames. Near a vertical screen the
    // roll is ill-conditioned in these angles, so those frames are skipped.
    auto rng = make_rng(15);
    int used = 0;
    while (used < 20000) {
        const auto f = oracle::random_frame(rng);
        const double h = std::hypot(f.y[0], f.y[1]);
        if (std::abs(oracle::dot(f.x, Vec3{f.y[1] / h, -f.y[0] / h, 0.0})) < 1e-2) continue;
        ++used;
        const SensorSample s{0.0, oracle::random_vec(rng, 15.0), oracle::angles_of(f)};
        const auto e = to_enu(s);
        const auto want = oracle::frame_apply(f, s.acc);
        CHECK(std::abs(e.eca - want[0]) <= 1e-9);
        CHECK(std::abs(e.nca - want[1]) <= 1e-9);
        CHECK(std::abs(e.vca + kGravity - want[2]) <= 1e-9);
    }
}

TEST_CASE("rotation is orthonormal and right-handed") {
    auto rng = make_rng(12);
    for (int i = 0; i < 2000; ++i) {
        const auto r = rotation_from(OrientationAngles::from_degrees(oracle::random_angles(rng)));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double d = 0.0;
                for (int k = 0; k < 3; ++k) d += r[k][a] * r[k][b];
                CHECK(std::abs(d - (a == b ? 1.0 : 0.0)) <= 1e-12);
            }
        const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                           r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                           r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        CHECK(det == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("isometry and yaw invariance") {
    auto rng = make_rng(13);
    for (int i = 0; i < 5000; ++i) {
        SensorSample s{0.0, oracle::random_vec(rng, 15.0), oracle::random_angles(rng)};
        const auto e = to_enu(s);
        CHECK(std::abs(std::hypot(e.eca, e.nca, e.vca + kGravity) - std::hypot(s.acc[0], s.acc[1], s.acc[2])) <=
              1e-9);
        CHECK(std::abs(e.hra - std::hypot(e.eca, e.nca)) <= 1e-9 * std::max(1.0, e.hra));

        s.orient[2] = std::fmod(s.orient[2] + uniform(rng, 0.0, 360.0), 360.0);
        const auto t = to_enu(s);
        CHECK(std::abs(t.hra - e.hra) <= 1e-9);
        CHECK(std::abs(t.vca - e.vca) <= 1e-9);
    }
}

TEST_CASE("rotate_inverse undoes rotate") {
    auto rng = make_rng(14);
    const auto r = rotation_from(OrientationAngles::from_degrees(oracle::random_angles(rng)));
    const Vec3 v{1.5, -2.0, 0.25};
    const auto back = rotate_inverse(r, rotate(r, v));
    for (int k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(v[k]).epsilon(1e-12));
}

TEST_CASE("flat phone facing north reads straight through") {
    const auto e = to_enu(SensorSample{0.0, {0.3, -0.4, kGravity}, {0.0, 0.0, 0.0}});
    CHECK(e.eca == doctest::Approx(0.3));
    CHECK(e.nca == doctest::Approx(-0.4));
    CHECK(std::abs(e.vca) < 1e-12);
    CHECK(e.hra == doctest::Approx(0.5));

    // Facing east: phone Y is east, X is south.
    const auto east = to_enu(SensorSample{0.0, {1.0, 2.0, kGravity}, {0.0, 0.0, 90.0}});
    CHECK(east.eca == doctest::Approx(2.0));
    CHECK(east.nca == doctest::Approx(-1.0));
}

TEST_CASE("upright phone: gravity along Y") {
    const auto e = to_enu(SensorSample{0.0, {0.0, kGravity, 0.0}, {90.0 - 1e-7, 0.0, 0.0}});
    CHECK(std::abs(e.vca) < 1e-6);
    CHECK(e.hra < 1e-6);
}

TEST_CASE("degenerate orientations reuse the previous rotation") {
    std::vector<SensorSample> s{{0.0, {1.0, 0.0, kGravity}, {0.0, 0.0, 30.0}},
                                {0.1, {1.0, 0.0, kGravity}, {90.0, 90.0, 0.0}},
                                {0.2, {1.0, 0.0, kGravity}, {0.0, 0.0, 30.0}}};
    const auto out = to_enu(s);
    REQUIRE(out.flagged == std::vector<std::size_t>{1});
    CHECK(out.samples[1].eca == doctest::Approx(out.samples[0].eca));
    CHECK(out.samples[1].nca == doctest::Approx(out.samples[0].nca));
}

TEST_CASE("zero-noise flat trip: HRA equals the profile's planar acceleration") {
    const auto gen = gen_network(4, 21);
    PhonePose pose;
    pose.flat = true;
    for (int id : {1, 6}) {  // forward and reverse
        const auto trace = gen_trip(gen.network, gen.profiles, id, 1, NoiseConfig::zero(), 5, pose);
        const auto enu = to_enu(trace.samples);
        double start = -1.0;
        for (const auto& r : *trace.ground_truth)
            if (parse_interval_label(r.label) == id) start = r.start;
        REQUIRE(start >= 0.0);
        const auto& prof = gen.profiles[1];  // reverse id 6 = 4 + (4 - 1 - 1) is the same track
        std::vector<const MotionPrimitive*> order;
        for (const auto& q : prof.primitives) order.push_back(&q);
        if (id >= 4) std::reverse(order.begin(), order.end());
        auto i = static_cast<std::size_t>(std::lround(start * trace.sample_rate));
        std::size_t checked = 0;
        for (const auto* q : order) {
            const auto n = static_cast<std::size_t>(std::lround(q->duration * trace.sample_rate));
            for (std::size_t k = 0; k < n; ++k, ++i) {
                CHECK(std::abs(enu.samples[i].hra - std::hypot(q->forward_accel, q->lateral_accel)) <= 1e-9);
                ++checked;
            }
        }
        CHECK(checked > 100);
    }
}

}
