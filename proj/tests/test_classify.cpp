#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "subtrace/classify.hpp"

using namespace subtrace;

namespace {

// Gaussian blobs; `spread` controls overlap. Centres depend on `seed` only,
// so a different `draw` gives a fresh sample from the same distribution.
Dataset blobs(int classes, int per_class, std::size_t dim, double spread, std::uint64_t seed,
              std::uint64_t draw = 0) {
    auto crng = make_rng(seed);
    std::vector<std::vector<double>> centres(classes, std::vector<double>(dim));
    for (auto& c : centres)
        for (auto& v : c) v = uniform(crng, -3.0, 3.0);
    auto rng = make_rng(derive_seed(seed, draw));
    Dataset d;
    d.class_count = classes;
    for (int i = 0; i < per_class; ++i)
        for (int c = 0; c < classes; ++c) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) x[j] = centres[c][j] + spread * gaussian(rng);
            d.add(std::move(x), c);
        }
    return d;
}

double accuracy(const auto& model, const Dataset& d) {
    std::size_t right = 0;
    for (std::size_t i = 0; i < d.size(); ++i) right += argmax(model.predict_proba(d.X[i])) == d.y[i];
    return static_cast<double>(right) / d.size();
}

FeatureConfig small_config(std::size_t dim) {
    // Any config works for the ensemble; the dimension is what is recorded.
    FeatureConfig fc;
    fc.use_peaks = dim != 46;
    return fc;
}

}  // namespace

TEST_SUITE("classify") {

TEST_CASE("naive Bayes separates well-separated blobs") {
    const auto train = blobs(4, 60, 5, 0.3, 1), test = blobs(4, 30, 5, 0.3, 1, 1);
    const auto nb = GaussianNB::fit(train);
    CHECK(accuracy(nb, test) > 0.97);
    const auto p = nb.predict_proba(test.X[0]);
    double s = 0.0;
    for (double v : p) s += v;
    CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("naive Bayes gives zero mass to absent classes") {
    auto d = blobs(3, 20, 2, 0.5, 2);
    d.class_count = 5;
    const auto nb = GaussianNB::fit(d);
    const auto p = nb.predict_proba(d.X[0]);
    REQUIRE(p.size() == 5);
    CHECK(p[3] == 0.0);
    CHECK(p[4] == 0.0);
}

TEST_CASE("boosting: recorded training error matches the model and beats chance") {
    const auto d = blobs(6, 40, 4, 1.6, 3);
    const auto model = train_adaboost_nb(d, 10, 7);
    REQUIRE(model.train_error.size() == model.learners.size());
    REQUIRE_FALSE(model.train_error.empty());
    CHECK(model.train_error.back() == doctest::Approx(1.0 - accuracy(model, d)).epsilon(1e-9));
    CHECK(model.train_error.back() < 1.0 - 1.0 / 6.0);
    for (double a : model.alpha) CHECK(a > 0.0);
}

TEST_CASE("forest: out-of-bag accuracy beats a single tree on held-out data") {
    const auto train = blobs(10, 30, 8, 2.0, 4), test = blobs(10, 30, 8, 2.0, 4, 1);
    const auto forest = train_random_forest(train, ForestParams{}, 9);
    ForestParams one;
    one.trees = 1;
    one.bootstrap = false;
    one.feature_frac = 1.0;
    const auto tree = train_random_forest(train, one, 9);
    CHECK(forest.oob_accuracy > accuracy(tree, test));
    CHECK(accuracy(forest, test) > accuracy(tree, test));
}

TEST_CASE("training is deterministic under a seed") {
    const auto d = blobs(5, 20, 4, 1.0, 5);
    const auto a = train_random_forest(d, ForestParams{}, 11), b = train_random_forest(d, ForestParams{}, 11);
    CHECK(a.predict_proba(d.X[3]) == b.predict_proba(d.X[3]));
    CHECK(a.oob_accuracy == b.oob_accuracy);
}

TEST_CASE("ensemble rows are probability distributions") {
    const auto d = blobs(6, 25, 46, 1.5, 6);
    EnsembleParams params;
    params.forest.trees = 30;
    const auto e = train_ensemble(d, small_config(46), params, 12);
    auto rng = make_rng(13);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> x(46);
        for (auto& v : x) v = uniform(rng, -10.0, 10.0);
        const auto row = e.predict_row(x);
        REQUIRE(row.size() == 6);
        double s = 0.0;
        for (double v : row) {
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("predict_matrix stacks predict_row") {
    const auto d = blobs(4, 20, 46, 1.0, 7);
    EnsembleParams params;
    params.forest.trees = 10;
    const auto e = train_ensemble(d, small_config(46), params, 14);
    std::vector<SegmentFeatures> segs(5);
    auto rng = make_rng(15);
    for (auto& s : segs) {
        s.length = uniform(rng, 100, 900);
        for (auto& b : s.stats) b.mean = gaussian(rng), b.std = std::abs(gaussian(rng));
    }
    const auto P = predict_matrix(e, segs);
    REQUIRE(P.rows() == 5);
    CHECK(P.row_stochastic());
    for (std::size_t i = 0; i < segs.size(); ++i) CHECK(P.row(i) == e.predict_row(segs[i]));
}

TEST_CASE("dataset validation") {
    Dataset d;
    d.class_count = 2;
    d.add({1.0, 2.0}, 0);
    d.add({1.0}, 1);
    CHECK_THROWS_AS(d.validate(), ValidationError);
    Dataset e;
    e.class_count = 2;
    e.add({1.0}, 2);
    CHECK_THROWS_AS(e.validate(), ValidationError);
}

}
