#pragma once

// Interval classifiers: boosted Gaussian naive Bayes (SAMME) and a CART
// random forest, averaged into one probability row per segment.

#include <cstdint>
#include <vector>

#include "subtrace/features.hpp"

namespace subtrace {

/// Feature rows with integer class labels in [0, class_count) and optional
/// per-row weights (empty means all 1).
struct Dataset {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    std::vector<double> w;
    int class_count = 0;

    std::size_t size() const { return y.size(); }
    double weight(std::size_t i) const { return w.empty() ? 1.0 : w[i]; }
    void add(std::vector<double> x, int label, double weight = 1.0);
    void validate() const;
};

class ProbabilityMatrix {
public:
    ProbabilityMatrix() = default;
    ProbabilityMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    static ProbabilityMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::vector<double> row(std::size_t i) const;

    /// True when every row is non-negative and sums to 1 within tol.
    bool row_stochastic(double tol = 1e-9) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct GaussianNB {
    int class_count = 0;
    std::vector<bool> present;
    std::vector<double> log_prior;
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> var;

    static GaussianNB fit(const Dataset& d, const std::vector<std::size_t>& rows,
                          const std::vector<double>& row_weight);
    static GaussianNB fit(const Dataset& d);
    std::vector<double> predict_proba(const std::vector<double>& x) const;
    int predict(const std::vector<double>& x) const;
};

struct BoostedNB {
    std::vector<GaussianNB> learners;
    std::vector<double> alpha;
    int class_count = 0;
    /// Weighted training error of the ensemble after each accepted round.
    std::vector<double> train_error;

    std::vector<double> predict_proba(const std::vector<double>& x) const;
};

BoostedNB train_adaboost_nb(const Dataset& d, int rounds, std::uint64_t seed);

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> hist;  // normalized class histogram at leaves
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    const std::vector<double>& leaf(const std::vector<double>& x) const;
};

struct ForestParams {
    int trees = 100;
    int max_depth = 12;
    int min_leaf = 2;
    double feature_frac = 0.0;  // 0 selects sqrt(D)/D
    bool bootstrap = true;
};

struct RandomForest {
    std::vector<DecisionTree> trees;
    int class_count = 0;
    double oob_accuracy = 0.0;

    std::vector<double> predict_proba(const std::vector<double>& x) const;
};

RandomForest train_random_forest(const Dataset& d, const ForestParams& params, std::uint64_t seed);

struct EnsembleParams {
    int boost_rounds = 10;
    ForestParams forest;
};

struct IntervalEnsemble {
    BoostedNB boosted;
    RandomForest forest;
    FeatureConfig feature_config;
    int class_count = 0;
    std::size_t dimension = 0;

    std::vector<double> predict_row(const std::vector<double>& x) const;
    std::vector<double> predict_row(const SegmentFeatures& f) const;
};

IntervalEnsemble train_ensemble(const Dataset& d, const FeatureConfig& cfg,
                                const EnsembleParams& params, std::uint64_t seed);

ProbabilityMatrix predict_matrix(const IntervalEnsemble& e, const std::vector<SegmentFeatures>& segments);

int argmax(const std::vector<double>& v);

}  // namespace subtrace
