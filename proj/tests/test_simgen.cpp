#include <doctest.h>

#include <cmath>
#include <numeric>

#include "subtrace/coord.hpp"
#include "subtrace/segment.hpp"
#include "subtrace/simgen.hpp"
#include "test_util.hpp"

using namespace subtrace;

namespace {

double mean_hra(const Trace& t, double from = 0.0, double to = 1e18) {
    const auto enu = to_enu(t.samples);
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& e : enu.samples)
        if (e.t >= from && e.t < to) {
            s += e.hra;
            ++n;
        }
    return n ? s / static_cast<double>(n) : 0.0;
}

std::vector<TruthRange> with_label(const Trace& t, const std::string& prefix) {
    std::vector<TruthRange> out;
    for (const auto& r : *t.ground_truth)
        if (r.label.rfind(prefix, 0) == 0) out.push_back(r);
    return out;
}

}  // namespace

TEST_SUITE("simgen") {

TEST_CASE("network and trips are pure functions of the seed") {
    const auto a = gen_network(10, 42), b = gen_network(10, 42), c = gen_network(10, 43);
    CHECK(a.network == b.network);
    CHECK(a.profiles == b.profiles);
    CHECK_FALSE(a.profiles == c.profiles);
    const NoiseConfig noise;
    CHECK(gen_trip(a.network, a.profiles, 0, 3, noise, 9) == gen_trip(a.network, a.profiles, 0, 3, noise, 9));
    CHECK_FALSE(gen_trip(a.network, a.profiles, 0, 3, noise, 9) == gen_trip(a.network, a.profiles, 0, 3, noise, 10));
}

TEST_CASE("profiles fit their interval bounds and end at rest") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const auto g = gen_network(10, seed);
        REQUIRE(g.profiles.size() == 10);
        int distinctive = 0;
        for (std::size_t k = 0; k < g.profiles.size(); ++k) {
            const auto& p = g.profiles[k];
            const auto& iv = g.network.intervals[k];
            CHECK(p.total_duration() >= iv.min_duration);
            CHECK(p.total_duration() <= iv.max_duration);
            CHECK(std::abs(p.net_speed_change()) < 1e-9);
            distinctive += p.distinctive;
        }
        CHECK(distinctive == 2);
    }
}

TEST_CASE("rides with maximal driver variation stay inside the bounds") {
    const auto g = gen_network(10, 8);
    NoiseConfig noise;
    noise.driver_variation = 1.0;  // capped internally
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto motion = simulate_trip_motion(g.network, g.profiles, 0, 10, noise, seed);
        for (const auto& r : motion.truth) {
            const auto id = parse_interval_label(r.label);
            if (!id) continue;
            const auto& iv = g.network.intervals[*id];
            CHECK(r.end - r.start >= iv.min_duration - 0.1);
            CHECK(r.end - r.start <= iv.max_duration + 0.1);
        }
    }
}

TEST_CASE("trip truth has n intervals and n - 1 dwells") {
    const auto g = gen_network(10, 3);
    const auto t = gen_trip(g.network, g.profiles, 12, 4, NoiseConfig{}, 1);
    const auto ivs = with_label(t, "interval:");
    CHECK(ivs.size() == 4);
    CHECK(with_label(t, "dwell").size() == 3);
    CHECK(with_label(t, "mode:metro").size() == 1);
    for (std::size_t k = 0; k < ivs.size(); ++k) CHECK(parse_interval_label(ivs[k].label) == 12 + static_cast<int>(k));
    CHECK_THROWS_AS(gen_trip(g.network, g.profiles, 8, 4, NoiseConfig{}, 1), ValidationError);
}

TEST_CASE("dwell HRA < default T1 < motion HRA") {
    const auto g = gen_network(10, 3);
    const auto t = gen_trip(g.network, g.profiles, 0, 5, NoiseConfig{}, 2);
    const auto enu = to_enu(t.samples);
    std::vector<double> hra;
    for (const auto& e : enu.samples) hra.push_back(e.hra);
    const auto p = with_threshold(segmenter_params(g.network), hra);
    double dwell = 0.0, motion = 0.0;
    for (const auto& r : with_label(t, "dwell")) dwell = std::max(dwell, mean_hra(t, r.start, r.end));
    motion = 1e9;
    for (const auto& r : with_label(t, "interval:")) motion = std::min(motion, mean_hra(t, r.start, r.end));
    CHECK(dwell < p.T1);
    CHECK(p.T1 < motion);
}

TEST_CASE("walking and buses shake more than the metro") {
    const auto g = gen_network(10, 3);
    const NoiseConfig noise;
    const double metro = mean_hra(gen_trip(g.network, g.profiles, 0, 5, noise, 4));
    CHECK(mean_hra(gen_other_mode(OtherMode::walk, 300, noise, 4)) > metro);
    CHECK(mean_hra(gen_other_mode(OtherMode::bus, 300, noise, 4)) > metro);
    CHECK(mean_hra(gen_other_mode(OtherMode::still, 300, noise, 4)) < metro);
}

TEST_CASE("mode boundaries coincide with amplitude changes") {
    const auto g = gen_network(10, 3);
    const auto day = gen_mixed_day(g.network, g.profiles,
                                   {ScheduleItem::other(OtherMode::walk, 120), ScheduleItem::trip(0, 2),
                                    ScheduleItem::other(OtherMode::walk, 120)},
                                   NoiseConfig{}, 5);
    const auto modes = with_label(day, "mode:");
    REQUIRE(modes.size() == 3);
    // Walking on one side of each boundary, the platform on the other, within 1 s.
    const double b0 = modes[0].end, b1 = modes[1].end;
    CHECK(mean_hra(day, b0 - 1.0, b0) > 4.0 * mean_hra(day, b0, b0 + 1.0));
    CHECK(mean_hra(day, b1, b1 + 1.0) > 4.0 * mean_hra(day, b1 - 1.0, b1));
}

TEST_CASE("defense noise is zero-mean") {
    const auto g = gen_network(10, 3);
    const auto t = gen_trip(g.network, g.profiles, 0, 3, NoiseConfig{}, 6);
    const double amp = 2.0;
    const auto noisy = apply_defense_noise(t, amp, 77);
    REQUIRE(noisy.samples.size() == t.samples.size());
    const double n = static_cast<double>(t.samples.size());
    for (int a = 0; a < 3; ++a) {
        double diff = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < t.samples.size(); ++i) {
            const double d = noisy.samples[i].acc[a] - t.samples[i].acc[a];
            diff += d;
            sq += d * d;
        }
        const double sigma = std::sqrt(sq / n);
        CHECK(sigma > 0.0);
        CHECK(std::abs(diff / n) <= 3.0 * sigma / std::sqrt(n));
    }
    CHECK(apply_defense_noise(t, 0.0, 77) == t);
}

TEST_CASE("profiles round trip") {
    testutil::TempDir dir("simgen");
    const auto g = gen_network(6, 9);
    save_profiles(g.profiles, dir / "p.json");
    CHECK(load_profiles(dir / "p.json") == g.profiles);
}

}
