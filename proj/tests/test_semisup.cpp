#include <doctest.h>

#include "subtrace/rng.hpp"
#include "subtrace/semisup.hpp"

using namespace subtrace;

namespace {

constexpr int kLine = 10;
constexpr std::size_t kDim = 46;

struct Signatures {
    std::vector<std::vector<double>> centres;
    explicit Signatures(std::uint64_t seed) : centres(2 * kLine, std::vector<double>(kDim)) {
        auto rng = make_rng(seed);
        for (auto& c : centres)
            for (auto& v : c) v = uniform(rng, -3.0, 3.0);
    }
    std::vector<double> draw(Rng& rng, int id, double spread = 1.0) const {
        auto x = centres[id];
        for (auto& v : x) v += spread * gaussian(rng);
        return x;
    }
};

FeatureConfig flat_config() {
    FeatureConfig fc;
    fc.use_peaks = false;  // 46 statistical values, matching kDim
    return fc;
}

SemisupParams fast_params() {
    SemisupParams p;
    p.ensemble.forest.trees = 20;
    p.ensemble.boost_rounds = 5;
    return p;
}

}  // namespace

TEST_SUITE("semisup") {

TEST_CASE("labels propagate by position from the hit") {
    // <S1 S2 S3 S4> with S3 = I_seed maps to seed-2, seed-1, seed, seed+1.
    const auto m = propagate_labels(4, 2, 5, kLine);
    CHECK(m == std::vector<std::pair<int, int>>{{0, 3}, {1, 4}, {2, 5}, {3, 6}});
}

TEST_CASE("propagation off the end of the line is dropped") {
    const auto m = propagate_labels(4, 1, 9, kLine);
    CHECK(m == std::vector<std::pair<int, int>>{{0, 8}, {1, 9}});
    const auto r = propagate_labels(3, 0, 10 + 8, kLine);  // reverse direction stays reverse
    CHECK(r == std::vector<std::pair<int, int>>{{0, 18}, {1, 19}});
}

TEST_CASE("conflicting hits: the more confident run wins") {
    const std::vector<Hit> hits{{0, 2, 0.9}, {1, 7, 0.6}};
    const auto run = resolve_conflicts(hits, kLine, 1.2);
    REQUIRE(run.has_value());
    CHECK(run->start == 2);
    CHECK(run->direction == Direction::forward);
}

TEST_CASE("near-equal conflicting hits are left unresolved") {
    const std::vector<Hit> hits{{0, 2, 0.9}, {1, 7, 0.85}};
    CHECK_FALSE(resolve_conflicts(hits, kLine, 1.2).has_value());
}

TEST_CASE("consistent hits add up") {
    const std::vector<Hit> hits{{0, 2, 0.5}, {1, 3, 0.5}, {0, 6, 0.8}};
    const auto run = resolve_conflicts(hits, kLine, 1.2);
    REQUIRE(run.has_value());
    CHECK(run->start == 2);
    CHECK(run->weight == doctest::Approx(1.0));
}

TEST_CASE("held-out sequences are excluded from the dataset") {
    LabelPool pool;
    pool.lists[1] = {{{1.0}, 1.0, 0, -1}, {{2.0}, 0.8, 1, 3}, {{3.0}, 0.8, 1, 4}};
    CHECK(pool.to_dataset(2).size() == 3);
    const auto d = pool.to_dataset(2, 3);
    REQUIRE(d.size() == 2);
    CHECK(d.X[1] == std::vector<double>{3.0});
    CHECK(d.w[1] == doctest::Approx(0.8));
}

TEST_CASE("seed classifier recognizes its interval on held-out data") {
    const Signatures sig(1);
    auto rng = make_rng(2);
    std::vector<std::vector<double>> pos, neg;
    for (int i = 0; i < 20; ++i) pos.push_back(sig.draw(rng, 6, 1.5));
    for (int i = 0; i < 60; ++i) neg.push_back(sig.draw(rng, static_cast<int>(uniform_index(rng, kLine)) % 6, 1.5));
    const auto c = build_seed_classifier(6, pos, neg, flat_config(), fast_params(), 3);
    int tp = 0, fp = 0;
    for (int i = 0; i < 100; ++i) {
        tp += c.classify(sig.draw(rng, 6, 1.5)).first;
        fp += c.classify(sig.draw(rng, 7 + i % 3, 1.5)).first;
    }
    CHECK(tp >= 80);
    CHECK(fp <= 10);
    CHECK_THROWS_AS(build_seed_classifier(6, {pos[0]}, neg, flat_config(), fast_params(), 3), ValidationError);
}

TEST_CASE("one seed bootstraps the whole line") {
    const Signatures sig(4);
    auto rng = make_rng(5);
    std::vector<SegmentSequence> sequences;
    std::vector<int> starts;
    for (int s = 0; s < 40; ++s) {
        const int len = 5 + static_cast<int>(uniform_index(rng, 6));
        const int start = static_cast<int>(uniform_index(rng, kLine - len + 1));
        SegmentSequence seq;
        for (int i = 0; i < len; ++i) seq.push_back(sig.draw(rng, start + i));
        sequences.push_back(std::move(seq));
        starts.push_back(start);
    }
    std::map<int, std::vector<std::vector<double>>> seed_data;
    for (int i = 0; i < 20; ++i) seed_data[5].push_back(sig.draw(rng, 5));
    std::vector<int> targets(kLine);
    for (int k = 0; k < kLine; ++k) targets[k] = k;

    auto params = fast_params();
    params.enough = 8;
    const auto res = bootstrap(sequences, seed_data, targets, kLine, flat_config(), params, 6);
    CHECK(res.full_coverage);
    CHECK(res.rounds.size() <= 5);
    std::size_t labeled = 0, correct = 0;
    for (std::size_t s = 0; s < sequences.size(); ++s)
        for (std::size_t i = 0; i < res.assigned[s].size(); ++i)
            if (res.assigned[s][i] >= 0) {
                ++labeled;
                correct += res.assigned[s][i] == starts[s] + static_cast<int>(i);
            }
    CHECK(labeled > 0);
    CHECK(correct >= labeled * 95 / 100);

    // Same inputs, same result.
    const auto again = bootstrap(sequences, seed_data, targets, kLine, flat_config(), params, 6);
    CHECK(again.assigned == res.assigned);
    CHECK(again.seeded == res.seeded);
}

TEST_CASE("no seeds is an error") {
    CHECK_THROWS_AS(bootstrap({}, {}, {0}, kLine, flat_config(), fast_params(), 1), ValidationError);
}

}
