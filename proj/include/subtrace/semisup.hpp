#pragma once

// Seed-interval bootstrap: binary seed classifiers vote on unlabeled segment
// sequences, hits are propagated positionally, and intervals that collect
// enough labels become new seeds.

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "subtrace/classify.hpp"

namespace subtrace {

struct SemisupParams {
    double hit_threshold = 0.5;   // seed confidence needed to count as a hit
    double margin = 1.2;          // winner weight over runner-up
    std::size_t enough = 20;      // labels per interval before it becomes a seed
    double late_weight = 0.8;     // training weight of labels from round >= 2
    int max_rounds = 10;
    std::size_t negative_sample = 60;  // unlabeled segments used as negatives
    EnsembleParams ensemble{10, {50, 12, 2, 0.0, true}};
};

struct SeedClassifier {
    int interval_id = 0;
    IntervalEnsemble model;  // class 1 = seed interval
    double threshold = 0.5;

    /// (is_seed, confidence in [0, 1]).
    std::pair<bool, double> classify(const std::vector<double>& x) const;
};

SeedClassifier build_seed_classifier(int interval_id, const std::vector<std::vector<double>>& positives,
                                     const std::vector<std::vector<double>>& negatives,
                                     const FeatureConfig& cfg, const SemisupParams& params,
                                     std::uint64_t seed);

struct PoolItem {
    std::vector<double> x;
    double weight = 1.0;
    int round = 0;      // 0 = seed data
    int sequence = -1;  // source sequence, -1 for seed data
};

struct LabelPool {
    std::map<int, std::vector<PoolItem>> lists;
    std::size_t enough_threshold = 20;

    std::size_t count(int interval) const;
    bool enough(int interval) const { return count(interval) > enough_threshold; }
    /// Items from `exclude_sequence` are left out (held-out evaluation).
    Dataset to_dataset(int class_count, int exclude_sequence = -1) const;
};

/// (segment index, interval id) for every in-line offset from the hit.
std::vector<std::pair<int, int>> propagate_labels(int sequence_length, int hit_position, int seed_interval,
                                                  int line);

struct Hit {
    int position = 0;
    int interval = 0;
    double confidence = 0.0;
};

/// Start interval of the run a hit implies (may fall off the line).
struct ImpliedRun {
    Direction direction = Direction::forward;
    int start = 0;  // position of segment 0 along `direction`
    double weight = 0.0;
};

std::optional<ImpliedRun> resolve_conflicts(const std::vector<Hit>& hits, int line, double margin);

struct RoundReport {
    int round = 0;
    std::vector<int> new_seeds;
    std::map<int, std::size_t> pool_sizes;
    std::size_t labeled_sequences = 0;
    std::size_t skipped_sequences = 0;
};

struct BootstrapResult {
    LabelPool pool;
    std::vector<RoundReport> rounds;
    std::vector<int> seeded;
    bool full_coverage = false;
    /// Per unlabeled sequence: the label assigned to each segment (-1 = none).
    std::vector<std::vector<int>> assigned;
};

using SegmentSequence = std::vector<std::vector<double>>;

/// `seed_data` maps each initial seed interval to its labeled feature rows.
/// `targets` lists the intervals that must be covered.
BootstrapResult bootstrap(const std::vector<SegmentSequence>& unlabeled,
                          const std::map<int, std::vector<std::vector<double>>>& seed_data,
                          const std::vector<int>& targets, int line, const FeatureConfig& cfg,
                          const SemisupParams& params, std::uint64_t seed);

}  // namespace subtrace
