#include <doctest.h>

#include <cmath>

#include "subtrace/coord.hpp"
#include "subtrace/evalharness.hpp"
#include "subtrace/extract.hpp"
#include "subtrace/rng.hpp"

using namespace subtrace;

namespace {

constexpr auto N = ModeLabel::non_metro;
constexpr auto M = ModeLabel::metro;

struct Fixture {
    BenchmarkConfig cfg;
    Corpus corpus;
    ModeModel model;
    std::vector<Trace> train;
    Fixture() {
        cfg.trips = 4;
        corpus = build_corpus(cfg);
        train = mixed_days(corpus, cfg, true);
        model = train_mode_model(train, corpus.net.network);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

std::vector<double> hra_of(const Trace& t) { return hra_values(to_enu(t.samples).samples); }

}  // namespace

TEST_SUITE("extract") {

TEST_CASE("window features match a direct recomputation") {
    auto rng = make_rng(3);
    std::vector<double> x(500);
    for (auto& v : x) v = std::abs(gaussian(rng, 0.2, 0.5));
    const Thresholds th{0.1, 0.4, 0.8};
    for (int k = 0; k < 50; ++k) {
        const std::size_t len = 1 + uniform_index(rng, 200);
        const std::size_t start = uniform_index(rng, x.size() - len + 1);
        double mean = 0.0;
        int c[3] = {0, 0, 0};
        for (std::size_t i = start; i < start + len; ++i) {
            mean += x[i];
            for (int j = 0; j < 3; ++j) c[j] += x[i] > th[j] ? 1 : 0;
        }
        mean /= static_cast<double>(len);
        double var = 0.0;
        for (std::size_t i = start; i < start + len; ++i) var += (x[i] - mean) * (x[i] - mean);
        var /= static_cast<double>(len);
        const auto f = window_features(x, start, len, th);
        CHECK(f.mean == doctest::Approx(mean).epsilon(1e-12));
        CHECK(f.variance == doctest::Approx(var).epsilon(1e-9));
        CHECK(f.nvht1 == c[0]);
        CHECK(f.nvht2 == c[1]);
        CHECK(f.nvht3 == c[2]);
    }
    CHECK_THROWS_AS(window_features(x, 450, 100, th), ValidationError);
}

TEST_CASE("thresholds are ordered percentiles") {
    std::vector<double> x;
    for (int i = 1; i <= 100; ++i) x.push_back(i);
    const auto th = metro_thresholds(x);
    CHECK(th[0] == doctest::Approx(50.5).epsilon(0.02));
    CHECK(th[1] == doctest::Approx(75.25).epsilon(0.02));
    CHECK(th[2] == doctest::Approx(90.1).epsilon(0.02));
}

TEST_CASE("isolated windows flip") {
    CHECK(flip_isolated(std::vector{N, M, N}) == std::vector{N, N, N});
    CHECK(flip_isolated(std::vector{M, N, M}) == std::vector{M, M, M});
    CHECK(flip_isolated(std::vector{N, M, M, N}) == std::vector{N, M, M, N});
    CHECK(flip_isolated(std::vector{M}) == std::vector{M});
}

TEST_CASE("an isolated metro window yields no span") {
    const auto& f = fixture();
    const std::vector<double> hra(3 * f.model.window, 0.05);
    CHECK(refine_boundaries(std::vector{N, M, N}, hra, f.model).empty());
}

TEST_CASE("training windows are reclassified correctly") {
    const auto& f = fixture();
    std::size_t total = 0, right = 0;
    for (const auto& day : f.train) {
        const auto hra = hra_of(day);
        for (const auto& w : labeled_windows(hra, day.sample_rate, *day.ground_truth, f.model.window,
                                             f.model.thresholds)) {
            ++total;
            right += f.model.predict(w.features) == w.label;
        }
    }
    REQUIRE(total > 50);
    CHECK(static_cast<double>(right) / total >= 0.95);
}

TEST_CASE("pure non-metro traces produce no spans") {
    const auto& f = fixture();
    for (auto mode : {OtherMode::still, OtherMode::walk, OtherMode::bus, OtherMode::taxi}) {
        const auto t = gen_other_mode(mode, 600, f.cfg.noise, 900 + static_cast<int>(mode));
        CAPTURE(to_string(mode));
        CHECK(extract_metro_spans(hra_of(t), f.model).empty());
    }
    const auto walk = hra_of(gen_other_mode(OtherMode::walk, 600, f.cfg.noise, 31));
    // The trailing partial window is too short to judge and is dropped by
    // the minimum span length; every full window must be non-metro.
    const auto labels = classify_windows(walk, f.model);
    for (std::size_t i = 0; (i + 1) * f.model.window <= walk.size(); ++i) CHECK(labels[i] == N);
}

TEST_CASE("a pure metro trip is metro except at the boundary") {
    const auto& f = fixture();
    const auto trip = gen_trip(f.corpus.net.network, f.corpus.net.profiles, 2, 5, f.cfg.noise, 1234);
    const auto labels = classify_windows(hra_of(trip), f.model);
    std::size_t metro = 0;
    for (auto l : labels) metro += l == M;
    CHECK(metro + 2 >= labels.size());
    const auto spans = extract_metro_spans(hra_of(trip), f.model);
    REQUIRE(spans.size() == 1);
}

TEST_CASE("span boundaries land within half a window of the mode changes") {
    const auto& f = fixture();
    const auto& net = f.corpus.net.network;
    const std::size_t w = f.model.window;
    const auto day = gen_mixed_day(net, f.corpus.net.profiles,
                                   {ScheduleItem::other(OtherMode::walk, 400), ScheduleItem::trip(1, 4),
                                    ScheduleItem::other(OtherMode::still, 300), ScheduleItem::trip(14, 3),
                                    ScheduleItem::other(OtherMode::bus, 400)},
                                   f.cfg.noise, 4321);
    std::vector<std::pair<std::size_t, std::size_t>> truth;
    for (const auto& r : *day.ground_truth)
        if (r.label == mode_label("metro"))
            truth.emplace_back(std::lround(r.start * day.sample_rate), std::lround(r.end * day.sample_rate));
    const auto spans = extract_metro_spans(hra_of(day), f.model);
    REQUIRE(spans.size() == truth.size());
    for (std::size_t k = 0; k < spans.size(); ++k) {
        CAPTURE(k);
        CHECK(std::abs(static_cast<long>(spans[k].start_index) - static_cast<long>(truth[k].first)) <= long(w / 2));
        CHECK(std::abs(static_cast<long>(spans[k].end_index) - static_cast<long>(truth[k].second)) <= long(w / 2));
    }
}

TEST_CASE("extraction window is half the shortest interval") {
    const auto& net = fixture().corpus.net.network;
    CHECK(extraction_window(net) ==
          static_cast<std::size_t>(std::floor(net.sample_rate * net.min_interval_duration() / 2.0)));
}

TEST_CASE("short input gives no spans") {
    const auto& f = fixture();
    const std::vector<double> hra(f.model.window - 1, 0.5);
    CHECK(extract_metro_spans(hra, f.model).empty());
}

}
