#include "subtrace/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "subtrace/log.hpp"
#include "subtrace/rng.hpp"

namespace subtrace {

void Dataset::add(std::vector<double> x, int label, double weight) {
    if (!w.empty() || weight != 1.0) {
        w.resize(y.size(), 1.0);
        w.push_back(weight);
    }
    X.push_back(std::move(x));
    y.push_back(label);
}

void Dataset::validate() const {
    if (y.empty()) throw ValidationError("training set is empty");
    if (X.size() != y.size() || (!w.empty() && w.size() != y.size()))
        throw ValidationError("training set columns disagree in length");
    const std::size_t dim = X.front().size();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0 || y[i] >= class_count) throw ValidationError("label outside class range");
        if (X[i].size() != dim) throw ValidationError("feature rows differ in dimension");
        if (!(weight(i) > 0.0)) throw ValidationError("row weights must be positive");
    }
}

int argmax(const std::vector<double>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

namespace {

void normalize(std::vector<double>& p) {
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    if (s > 0.0)
        for (double& v : p) v /= s;
}

}  // namespace

// ---------------------------------------------------------------------------

ProbabilityMatrix ProbabilityMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    ProbabilityMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw ValidationError("ragged probability rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

std::vector<double> ProbabilityMatrix::row(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

bool ProbabilityMatrix::row_stochastic(double tol) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (at(i, j) < 0.0) return false;
            s += at(i, j);
        }
        if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

GaussianNB GaussianNB::fit(const Dataset& d, const std::vector<std::size_t>& rows,
                           const std::vector<double>& rw) {
    const int K = d.class_count;
    const std::size_t D = d.X.front().size();
    GaussianNB m;
    m.class_count = K;
    m.present.assign(K, false);
    m.log_prior.assign(K, -std::numeric_limits<double>::infinity());
    m.mean.assign(K, std::vector<double>(D, 0.0));
    m.var.assign(K, std::vector<double>(D, 0.0));

    std::vector<double> cw(K, 0.0);
    std::vector<double> gmean(D, 0.0), gvar(D, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& x = d.X[rows[r]];
        const int c = d.y[rows[r]];
        cw[c] += rw[r];
        total += rw[r];
        for (std::size_t k = 0; k < D; ++k) {
            m.mean[c][k] += rw[r] * x[k];
            gmean[k] += rw[r] * x[k];
        }
    }
    for (std::size_t k = 0; k < D; ++k) gmean[k] /= total;
    for (int c = 0; c < K; ++c)
        if (cw[c] > 0.0)
            for (double& v : m.mean[c]) v /= cw[c];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& x = d.X[rows[r]];
        const int c = d.y[rows[r]];
        for (std::size_t k = 0; k < D; ++k) {
            const double dc = x[k] - m.mean[c][k];
            const double dg = x[k] - gmean[k];
            m.var[c][k] += rw[r] * dc * dc;
            gvar[k] += rw[r] * dg * dg;
        }
    }
    for (int c = 0; c < K; ++c) {
        if (cw[c] <= 0.0) continue;
        m.present[c] = true;
        m.log_prior[c] = std::log(cw[c] / total);
        // Floor relative to the pooled spread keeps constant features from dominating.
        for (std::size_t k = 0; k < D; ++k)
            m.var[c][k] = std::max(m.var[c][k] / cw[c], 1e-3 * gvar[k] / total + 1e-9);
    }
    return m;
}

GaussianNB GaussianNB::fit(const Dataset& d) {
    std::vector<std::size_t> rows(d.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> w(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) w[i] = d.weight(i);
    return fit(d, rows, w);
}

std::vector<double> GaussianNB::predict_proba(const std::vector<double>& x) const {
    std::vector<double> l(class_count, -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < class_count; ++c) {
        if (!present[c]) continue;
        double s = log_prior[c];
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double dd = x[k] - mean[c][k];
            s -= 0.5 * (std::log(2.0 * std::numbers::pi * var[c][k]) + dd * dd / var[c][k]);
        }
        l[c] = s;
        best = std::max(best, s);
    }
    std::vector<double> p(class_count, 0.0);
    for (int c = 0; c < class_count; ++c)
        if (present[c]) p[c] = std::exp(l[c] - best);
    normalize(p);
    return p;
}

int GaussianNB::predict(const std::vector<double>& x) const { return argmax(predict_proba(x)); }

// ---------------------------------------------------------------------------
// SAMME boosting over weight-proportional resamples

std::vector<double> BoostedNB::predict_proba(const std::vector<double>& x) const {
    std::vector<double> score(class_count, 0.0);
    std::vector<bool> present(class_count, false);
    double asum = 0.0;
    for (std::size_t t = 0; t < learners.size(); ++t) {
        score[learners[t].predict(x)] += alpha[t];
        asum += alpha[t];
        for (int c = 0; c < class_count; ++c) present[c] = present[c] || learners[t].present[c];
    }
    const int k = static_cast<int>(std::count(present.begin(), present.end(), true));
    std::vector<double> p(class_count, 0.0);
    if (asum <= 0.0) return p;
    const double scale = std::max(1, k - 1) / asum;
    double top = 0.0;
    for (int c = 0; c < class_count; ++c)
        if (present[c]) top = std::max(top, score[c] * scale);
    for (int c = 0; c < class_count; ++c)
        if (present[c]) p[c] = std::exp(score[c] * scale - top);
    normalize(p);
    return p;
}

BoostedNB train_adaboost_nb(const Dataset& d, int rounds, std::uint64_t seed) {
    d.validate();
    if (rounds < 1) throw ValidationError("boosting needs at least one round");
    const std::size_t n = d.size();
    Rng rng = make_rng(derive_seed(seed, "adaboost"));

    std::vector<bool> present(d.class_count, false);
    for (int c : d.y) present[c] = true;
    const int k = static_cast<int>(std::count(present.begin(), present.end(), true));

    BoostedNB model;
    model.class_count = d.class_count;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = d.weight(i);
    normalize(w);
    const std::vector<double> ones(n, 1.0);

    auto ensemble_error = [&]() {
        double e = 0.0, tot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tot += d.weight(i);
            if (argmax(model.predict_proba(d.X[i])) != d.y[i]) e += d.weight(i);
        }
        return e / tot;
    };

    const int max_attempts = 3;
    for (int r = 0; r < rounds; ++r) {
        bool accepted = false;
        for (int attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
            // Weight-proportional resample via the cumulative distribution.
            std::vector<double> cdf(n);
            std::partial_sum(w.begin(), w.end(), cdf.begin());
            std::vector<std::size_t> rows(n);
            for (auto& idx : rows) {
                const double u = uniform01(rng) * cdf.back();
                idx = std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), n - 1);
            }
            auto learner = GaussianNB::fit(d, rows, ones);
            std::vector<bool> miss(n);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                miss[i] = learner.predict(d.X[i]) != d.y[i];
                if (miss[i]) err += w[i];
            }
            if (k > 1 && err >= 1.0 - 1.0 / k) continue;
            accepted = true;
            const double e = std::max(err, 1e-10);
            const double a = std::log((1.0 - e) / e) + std::log(std::max(1, k - 1));
            model.learners.push_back(std::move(learner));
            model.alpha.push_back(std::max(a, 1e-10));
            model.train_error.push_back(ensemble_error());
            if (err <= 0.0) return model;
            for (std::size_t i = 0; i < n; ++i)
                if (miss[i]) w[i] *= std::exp(a);
            normalize(w);
        }
        if (!accepted) break;
    }
    if (model.learners.empty()) {
        spdlog::warn("boosting produced no usable learner; using plain naive Bayes");
        model.learners.push_back(GaussianNB::fit(d));
        model.alpha.push_back(1.0);
        model.train_error.push_back(ensemble_error());
    }
    return model;
}

// ---------------------------------------------------------------------------
// CART forest

const std::vector<double>& DecisionTree::leaf(const std::vector<double>& x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0)
        i = static_cast<std::size_t>(x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
    return nodes[i].hist;
}

namespace {

struct TreeBuilder {
    const Dataset& d;
    const ForestParams& p;
    std::size_t mtry;
    Rng& rng;
    DecisionTree tree;

    static double gini(const std::vector<double>& h, double tot) {
        if (tot <= 0.0) return 0.0;
        double s = 1.0;
        for (double v : h) s -= (v / tot) * (v / tot);
        return s;
    }

    int make_leaf(const std::vector<std::size_t>& rows) {
        TreeNode node;
        node.hist.assign(d.class_count, 0.0);
        for (auto r : rows) node.hist[d.y[r]] += d.weight(r);
        normalize(node.hist);
        tree.nodes.push_back(std::move(node));
        return static_cast<int>(tree.nodes.size() - 1);
    }

    int build(std::vector<std::size_t>& rows, int depth) {
        const int K = d.class_count;
        std::vector<double> hist(K, 0.0);
        double tot = 0.0;
        for (auto r : rows) {
            hist[d.y[r]] += d.weight(r);
            tot += d.weight(r);
        }
        const bool pure = std::count_if(hist.begin(), hist.end(), [](double v) { return v > 0.0; }) <= 1;
        const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, p.min_leaf));
        if (pure || depth >= p.max_depth || rows.size() < 2 * min_leaf) return make_leaf(rows);

        const std::size_t D = d.X.front().size();
        std::vector<std::size_t> feats(D);
        std::iota(feats.begin(), feats.end(), 0);
        for (std::size_t i = 0; i < mtry && i < D; ++i)
            std::swap(feats[i], feats[i + uniform_index(rng, D - i)]);

        double best_gain = 1e-12;
        int best_f = -1;
        double best_t = 0.0;
        const double parent = gini(hist, tot);
        std::vector<std::size_t> order = rows;
        for (std::size_t fi = 0; fi < std::min(mtry, D); ++fi) {
            const std::size_t f = feats[fi];
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return d.X[a][f] < d.X[b][f]; });
            std::vector<double> left(K, 0.0);
            double lt = 0.0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const auto r = order[i];
                left[d.y[r]] += d.weight(r);
                lt += d.weight(r);
                const double xv = d.X[r][f], xn = d.X[order[i + 1]][f];
                if (xv == xn || i + 1 < min_leaf || order.size() - i - 1 < min_leaf) continue;
                std::vector<double> right(K);
                for (int c = 0; c < K; ++c) right[c] = hist[c] - left[c];
                const double rt = tot - lt;
                const double g = parent - (lt / tot) * gini(left, lt) - (rt / tot) * gini(right, rt);
                if (g > best_gain) {
                    best_gain = g;
                    best_f = static_cast<int>(f);
                    best_t = 0.5 * (xv + xn);
                }
            }
        }
        if (best_f < 0) return make_leaf(rows);

        std::vector<std::size_t> lrows, rrows;
        for (auto r : rows) (d.X[r][best_f] <= best_t ? lrows : rrows).push_back(r);
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{best_f, best_t, -1, -1, {}});
        const int l = build(lrows, depth + 1);
        const int r = build(rrows, depth + 1);
        tree.nodes[id].left = l;
        tree.nodes[id].right = r;
        return id;
    }
};

}  // namespace

std::vector<double> RandomForest::predict_proba(const std::vector<double>& x) const {
    std::vector<double> p(class_count, 0.0);
    for (const auto& t : trees) {
        const auto& h = t.leaf(x);
        for (int c = 0; c < class_count; ++c) p[c] += h[c];
    }
    normalize(p);
    return p;
}

RandomForest train_random_forest(const Dataset& d, const ForestParams& params, std::uint64_t seed) {
    d.validate();
    if (params.trees < 1) throw ValidationError("forest needs at least one tree");
    const std::size_t n = d.size();
    const std::size_t D = d.X.front().size();
    const double frac = params.feature_frac > 0.0 ? params.feature_frac : std::sqrt(static_cast<double>(D)) / D;
    const std::size_t mtry = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(frac * static_cast<double>(D))), 1, D);

    RandomForest forest;
    forest.class_count = d.class_count;
    std::vector<std::vector<double>> oob(n, std::vector<double>(d.class_count, 0.0));
    std::vector<bool> has_oob(n, false);
    for (int t = 0; t < params.trees; ++t) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows(n);
        std::vector<bool> in_bag(n, !params.bootstrap);
        if (params.bootstrap) {
            for (auto& r : rows) {
                r = uniform_index(rng, n);
                in_bag[r] = true;
            }
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        TreeBuilder b{d, params, mtry, rng, {}};
        b.build(rows, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (in_bag[i]) continue;
            const auto& h = b.tree.leaf(d.X[i]);
            for (int c = 0; c < d.class_count; ++c) oob[i][c] += h[c];
            has_oob[i] = true;
        }
        forest.trees.push_back(std::move(b.tree));
    }
    std::size_t seen = 0, right = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!has_oob[i]) continue;
        ++seen;
        right += argmax(oob[i]) == d.y[i];
    }
    forest.oob_accuracy = seen ? static_cast<double>(right) / seen : 0.0;
    return forest;
}

// ---------------------------------------------------------------------------

std::vector<double> IntervalEnsemble::predict_row(const std::vector<double>& x) const {
    if (x.size() != dimension) throw ValidationError("feature vector does not match the model dimension");
    auto a = boosted.predict_proba(x);
    const auto b = forest.predict_proba(x);
    for (int c = 0; c < class_count; ++c) a[c] = 0.5 * a[c] + 0.5 * b[c];
    normalize(a);
    return a;
}

std::vector<double> IntervalEnsemble::predict_row(const SegmentFeatures& f) const {
    return predict_row(f.to_vector(feature_config));
}

IntervalEnsemble train_ensemble(const Dataset& d, const FeatureConfig& cfg,
                                const EnsembleParams& params, std::uint64_t seed) {
    d.validate();
    IntervalEnsemble e;
    e.class_count = d.class_count;
    e.feature_config = cfg;
    e.dimension = d.X.front().size();
    e.boosted = train_adaboost_nb(d, params.boost_rounds, derive_seed(seed, "boost"));
    e.forest = train_random_forest(d, params.forest, derive_seed(seed, "forest"));
    return e;
}

ProbabilityMatrix predict_matrix(const IntervalEnsemble& e, const std::vector<SegmentFeatures>& segments) {
    if (segments.empty()) throw ValidationError("no segments to classify");
    std::vector<std::vector<double>> rows;
    rows.reserve(segments.size());
    for (const auto& s : segments) rows.push_back(e.predict_row(s));
    return ProbabilityMatrix::from_rows(rows);
}

}  // namespace subtrace
