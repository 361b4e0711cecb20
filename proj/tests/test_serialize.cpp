#include <doctest.h>

#include <cmath>

#include "subtrace/coord.hpp"
#include "subtrace/evalharness.hpp"
#include "subtrace/extract.hpp"
#include "subtrace/serialize.hpp"
#include "subtrace/simgen.hpp"
#include "test_util.hpp"

using namespace subtrace;

namespace {

struct Fixture {
    Corpus corpus;
    ModelBundle bundle;
    std::vector<std::vector<double>> rows;
};

// Forward-only training leaves the reverse classes absent, so their
// log-priors are -inf and exercise the non-finite encoding.
const Fixture& fixture() {
    static const Fixture f = [] {
        BenchmarkConfig cfg;
        cfg.trips = 2;
        cfg.mixed_train_days = 1;
        Fixture out;
        out.corpus = build_corpus(cfg);
        std::vector<const Trace*> ptrs;
        for (const auto& t : out.corpus.trips) ptrs.push_back(&t);
        const auto td = supervised_training_data(ptrs, out.corpus.net.network, false);
        EnsembleParams p;
        p.boost_rounds = 3;
        p.forest.trees = 8;
        out.bundle.network_name = out.corpus.net.network.name;
        out.bundle.line_length = out.corpus.net.network.line_length();
        out.bundle.intervals = train_ensemble(td.data, td.features, p, 5);
        out.bundle.mode = train_mode_model(mixed_days(out.corpus, cfg, true), out.corpus.net.network);
        out.rows = td.data.X;
        return out;
    }();
    return f;
}

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("bundle round trip preserves predictions bit for bit") {
    const auto& f = fixture();
    testutil::TempDir dir("serialize");
    save_model(f.bundle, dir / "model.json");
    const auto back = load_model(dir / "model.json");
    CHECK(back.network_name == f.bundle.network_name);
    CHECK(back.line_length == f.bundle.line_length);
    REQUIRE(back.mode.has_value());
    CHECK(back.mode->window == f.bundle.mode->window);
    CHECK(back.intervals.dimension == f.bundle.intervals.dimension);
    for (const auto& x : f.rows) CHECK(back.intervals.predict_row(x) == f.bundle.intervals.predict_row(x));

    // Mode decisions agree on real windows.
    const auto& trip = f.corpus.trips.front();
    const auto hra = hra_values(to_enu(trip.samples).samples);
    CHECK(classify_windows(hra, *back.mode) == classify_windows(hra, *f.bundle.mode));

    // Saving again yields the same bytes.
    save_model(back, dir / "again.json");
    CHECK(read_text_file(dir / "model.json") == read_text_file(dir / "again.json"));
}

TEST_CASE("absent classes keep -inf log priors") {
    const auto& f = fixture();
    const auto& nb = f.bundle.intervals.boosted.learners.front();
    const int L = f.bundle.line_length;
    REQUIRE(std::isinf(nb.log_prior[L]));
    const auto back = bundle_from_json(to_json(f.bundle));
    const auto& nb2 = back.intervals.boosted.learners.front();
    for (std::size_t c = 0; c < nb.log_prior.size(); ++c) CHECK(nb2.log_prior[c] == nb.log_prior[c]);
    CHECK(to_json(f.bundle).dump().find("\"-inf\"") != std::string::npos);
}

TEST_CASE("format, version and body errors") {
    const auto& f = fixture();
    auto j = to_json(f.bundle);
    CHECK(j.at("format") == kModelFormat);
    CHECK(j.at("version") == kModelVersion);

    auto bad = j;
    bad["format"] = "something-else";
    CHECK_THROWS_AS(bundle_from_json(bad), FormatError);
    bad = j;
    bad["version"] = kModelVersion + 1;
    CHECK_THROWS_AS(bundle_from_json(bad), FormatError);
    bad = j;
    bad.erase("intervals");
    CHECK_THROWS_AS(bundle_from_json(bad), FormatError);
    bad = j;
    bad["line_length"] = f.bundle.line_length + 1;
    CHECK_THROWS_AS(bundle_from_json(bad), FormatError);

    testutil::TempDir dir("serialize_bad");
    write_text_file(dir / "trunc.json", j.dump().substr(0, 200));
    CHECK_THROWS_AS(load_model(dir / "trunc.json"), FormatError);
    CHECK_THROWS_AS(load_model(dir / "missing.json"), Error);
}

TEST_CASE("feature config round trip") {
    const auto& fc = fixture().bundle.intervals.feature_config;
    const auto back = feature_config_from_json(to_json(fc));
    CHECK(back.dimension() == fc.dimension());
    CHECK(to_json(back) == to_json(fc));
}

}  // TEST_SUITE
