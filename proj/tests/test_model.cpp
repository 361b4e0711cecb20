#include <doctest.h>

#include <fstream>

#include "subtrace/model.hpp"
#include "subtrace/rng.hpp"
#include "test_util.hpp"

using namespace subtrace;

namespace {

Trace random_trace(Rng& rng, std::size_t n, bool with_truth) {
    Trace t;
    t.device_id = "dev-" + std::to_string(rng() % 1000);
    t.sample_rate = 10.0;
    for (std::size_t i = 0; i < n; ++i) {
        SensorSample s;
        s.t = 0.1 * static_cast<double>(i);
        s.acc = {uniform(rng, -20, 20), uniform(rng, -20, 20), uniform(rng, -20, 20)};
        s.orient = {uniform(rng, -90, 90), uniform(rng, -180, 180), uniform(rng, 0, 360)};
        t.samples.push_back(s);
    }
    if (with_truth) t.ground_truth = std::vector<TruthRange>{{0.0, 1.5, "mode:walk"}, {1.5, 2.0, "interval:3"}};
    return t;
}

MetroNetwork three_stop_line() {
    std::vector<StationInterval> fwd{{0, "A", "B", 60, 80, Direction::forward},
                                     {0, "B", "C", 90, 110, Direction::forward},
                                     {0, "C", "D", 70, 75, Direction::forward}};
    return MetroNetwork::from_forward("demo", 10.0, fwd, 25.0, 40.0);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("trace round trip preserves every field") {
    testutil::TempDir dir("model");
    auto rng = make_rng(1);
    for (int k = 0; k < 20; ++k) {
        const Trace t = random_trace(rng, 1 + rng() % 50, k % 2 == 0);
        save_trace(t, dir / "t.jsonl");
        CHECK(load_trace(dir / "t.jsonl") == t);
    }
}

TEST_CASE("orientation angles are normalized on load") {
    CHECK(normalize_orientation({0, 190, -10}) == Vec3{0, -170, 350});
    CHECK(normalize_orientation({95, -540, 720}) == Vec3{90, -180, 0});
    const auto n = normalize_orientation({10, 45, 359.5});
    CHECK(n[2] == doctest::Approx(359.5));
}

TEST_CASE("parse errors carry the line number") {
    testutil::TempDir dir("model");
    const auto path = dir / "bad.jsonl";
    {
        std::ofstream out(path);
        out << R"({"meta": {"device_id": "x", "sample_rate": 10}})" << '\n'
            << R"({"t": 0, "acc": [0, 0, 9.8], "orient": [0, 0, 0]})" << '\n'
            << R"({"t": 0.1, "acc": [0, 0], "orient": [0, 0, 0]})" << '\n';
    }
    try {
        load_trace(path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("non-increasing timestamps are rejected") {
    Trace t;
    t.samples = {{0.0, {}, {}}, {0.1, {}, {}}, {0.1, {}, {}}};
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t.samples[2].t = 0.2;
    CHECK_NOTHROW(t.validate());
}

TEST_CASE("reverse ids mirror the forward line") {
    const auto net = three_stop_line();
    REQUIRE(net.interval_count() == 6);
    CHECK(net.line_length() == 3);
    // Forward k and reverse L + (L - 1 - k) are the same track.
    for (int k = 0; k < 3; ++k) {
        const auto& f = net.intervals[k];
        const auto& r = net.intervals[3 + (2 - k)];
        CHECK(r.from_station == f.to_station);
        CHECK(r.to_station == f.from_station);
        CHECK(r.direction == Direction::reverse);
        CHECK(r.min_duration == f.min_duration);
    }
    CHECK(net.interval_id(Direction::reverse, 1) == 4);
    CHECK(net.direction_of(4) == Direction::reverse);
    CHECK(net.position_of(4) == 1);
    CHECK(net.min_interval_duration() == 60.0);
    CHECK(net.max_interval_duration() == 110.0);
}

TEST_CASE("network round trip and validation") {
    testutil::TempDir dir("model");
    const auto net = three_stop_line();
    save_network(net, dir / "net.json");
    CHECK(load_network(dir / "net.json") == net);

    auto bad = net;
    bad.dwell_min = 10.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("truth labels") {
    CHECK(parse_interval_label(interval_label(12)) == 12);
    CHECK_FALSE(parse_interval_label("dwell").has_value());
    CHECK_FALSE(parse_interval_label("interval:x").has_value());
    CHECK(is_mode_label(mode_label("metro")));
    CHECK_FALSE(is_mode_label("interval:1"));
}

}
