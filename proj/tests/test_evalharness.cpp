#include <doctest.h>

#include "oracles.hpp"
#include "subtrace/coord.hpp"
#include "subtrace/evalharness.hpp"

using namespace subtrace;

namespace {

const Corpus& small_corpus() {
    static const Corpus c = [] {
        BenchmarkConfig cfg;
        cfg.trips = 3;
        return build_corpus(cfg);
    }();
    return c;
}

}  // namespace

TEST_SUITE("evalharness") {

TEST_CASE("edit distance tolerance boundary") {
    const std::vector<double> truth{50.0, 200.0, 380.0};
    CHECK(edit_distance(std::vector<double>{59.0, 200.0, 380.0}, truth) == 0);
    CHECK(edit_distance(std::vector<double>{61.0, 200.0, 380.0}, truth) >= 1);
    CHECK(edit_distance(std::vector<double>{200.0, 380.0}, truth) == 1);
    CHECK(edit_distance(std::vector<double>{}, truth) == 3);
}

TEST_CASE("edit distance matches the recursive oracle") {
    auto rng = make_rng(1);
    for (int k = 0; k < 2000; ++k) {
        std::vector<double> a(uniform_index(rng, 7)), b(uniform_index(rng, 7));
        for (auto& v : a) v = std::round(uniform(rng, 0.0, 80.0));
        for (auto& v : b) v = std::round(uniform(rng, 0.0, 80.0));
        CHECK(edit_distance(a, b) == oracle::edit_distance(a, b));
    }
}

TEST_CASE("confusion rows are percentages") {
    const auto c = confusion_matrix({0, 1, 1, 2, 0}, {0, 1, 2, 2, 1}, 4);
    CHECK(c[0][0] == 100.0);
    CHECK(c[1][0] == 50.0);
    CHECK(c[1][1] == 50.0);
    CHECK(c[2][1] == 50.0);
    for (double v : c[3]) CHECK(v == 0.0);
    CHECK_THROWS_AS(confusion_matrix({0}, {5}, 4), ValidationError);
}

TEST_CASE("truth segmentation tiles the trip and matches the labels") {
    const auto& c = small_corpus();
    for (const auto& trip : c.trips) {
        const auto truth = trip_truth(trip);
        REQUIRE(truth.intervals.size() == 10);
        REQUIRE(truth.dwells.size() == 9);
        const auto segs = truth_segments(truth, trip.samples.size());
        REQUIRE(segs.size() == 10);
        CHECK(segs.front().start_index == 0);
        CHECK(segs.back().end_index == trip.samples.size());
        for (std::size_t k = 0; k < segs.size(); ++k) {
            if (k) CHECK(segs[k].start_index == segs[k - 1].end_index);
            CHECK(segs[k].true_interval == static_cast<int>(k));
            CHECK(majority_interval(segs[k], truth) == static_cast<int>(k));
        }
        const auto pts = truth_points(truth, trip.sample_rate);
        for (std::size_t k = 0; k < pts.size(); ++k)
            CHECK(pts[k] == doctest::Approx((truth.dwells[k].first + truth.dwells[k].second) / 2.0 / trip.sample_rate)
                                .epsilon(1e-3));
    }
}

TEST_CASE("corpus is deterministic and marks the distinctive intervals") {
    BenchmarkConfig cfg;
    cfg.trips = 3;
    const auto again = build_corpus(cfg);
    const auto& c = small_corpus();
    CHECK(again.trips == c.trips);
    CHECK(again.trip_seeds == c.trip_seeds);
    const auto d = distinctive_intervals(c.net);
    REQUIRE(d.size() == 2);
    for (int id : d) CHECK(c.net.profiles[id].distinctive);
    CHECK(forward_intervals(c.net.network).size() == 10);
}

TEST_CASE("opposite interval and time reversal are involutions") {
    const auto& net = small_corpus().net.network;
    for (int id = 0; id < net.interval_count(); ++id) {
        const int o = opposite_interval(net, id);
        CHECK(o != id);
        CHECK(opposite_interval(net, o) == id);
        CHECK(net.intervals[o].from_station == net.intervals[id].to_station);
    }
    std::vector<EnuSample> seg{{0.0, 1, 2, 3, 4}, {0.1, 5, 6, 7, 8}, {0.2, 9, 10, 11, 12}};
    const auto r = time_reversed(seg);
    CHECK(r[0].eca == 9);
    CHECK(r[0].t == doctest::Approx(0.0));
    const auto rr = time_reversed(r);
    for (std::size_t i = 0; i < seg.size(); ++i) {
        CHECK(rr[i].eca == seg[i].eca);
        CHECK(rr[i].t == doctest::Approx(seg[i].t));
    }
}

TEST_CASE("reverse augmentation doubles the rows with opposite labels") {
    const auto& c = small_corpus();
    std::vector<const Trace*> trips{&c.trips[0], &c.trips[1]};
    const auto plain = supervised_training_data(trips, c.net.network, false);
    const auto both = supervised_training_data(trips, c.net.network, true);
    CHECK(plain.data.size() == 20);
    REQUIRE(both.data.size() == 40);
    CHECK(plain.data.class_count == 20);
    int reverse = 0;
    for (int y : both.data.y) reverse += y >= 10;
    CHECK(reverse == 20);
}

TEST_CASE("mixed days carry metro truth") {
    BenchmarkConfig cfg;
    cfg.trips = 3;
    cfg.mixed_days = 2;
    const auto days = mixed_days(small_corpus(), cfg, false);
    REQUIRE(days.size() == 2);
    for (const auto& d : days) {
        const auto mask = metro_mask(d.samples.size(), d.sample_rate, *d.ground_truth);
        CHECK(std::count(mask.begin(), mask.end(), true) > 0);
        CHECK(std::count(mask.begin(), mask.end(), false) > 0);
    }
}

TEST_CASE("seed features come from the seed interval") {
    BenchmarkConfig cfg;
    cfg.trips = 3;
    cfg.seed_extra = 3;
    const auto& c = small_corpus();
    const auto rides = seed_rides(c, cfg, 7);
    REQUIRE(rides.size() == 3);
    for (const auto& r : rides) {
        bool has = false;
        for (const auto& t : *r.ground_truth) has = has || parse_interval_label(t.label) == 7;
        CHECK(has);
        CHECK(seed_features(r, 7, FeatureConfig{}).size() == 1);
    }
}

}
