#pragma once

// Metrics and experiment protocols on synthetic corpora: extraction
// coverage, segmentation edit distance, per-segment confusion, trace
// accuracy versus trip length, supervised versus bootstrapped training.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "subtrace/classify.hpp"
#include "subtrace/extract.hpp"
#include "subtrace/infer.hpp"
#include "subtrace/semisup.hpp"
#include "subtrace/simgen.hpp"

namespace subtrace {

// ---------------------------------------------------------------------------
// Metrics

/// Levenshtein distance where two points are equal when |a - b| < tolerance.
int edit_distance(std::span<const double> predicted, std::span<const double> truth, double tolerance = 10.0);

/// Row-normalized percentages; rows with no samples stay zero.
std::vector<std::vector<double>> confusion_matrix(const std::vector<int>& predicted,
                                                  const std::vector<int>& truth, int m);

// ---------------------------------------------------------------------------
// Ground truth helpers

struct TripTruth {
    std::vector<Segment> intervals;  // motion ranges, true_interval set
    std::vector<std::pair<std::size_t, std::size_t>> dwells;
};

TripTruth trip_truth(const Trace& trace);

/// Training segmentation: cuts at dwell centres; the outer segments reach
/// sample 0 and n.
std::vector<Segment> truth_segments(const TripTruth& truth, std::size_t n);

/// Interval with the largest overlap with the segment, -1 when none.
int majority_interval(const Segment& segment, const TripTruth& truth);

/// Dwell centres in seconds.
std::vector<double> truth_points(const TripTruth& truth, double rate);

// ---------------------------------------------------------------------------
// Corpus

struct BenchmarkConfig {
    std::uint64_t seed = 20240611;
    int line_length = 10;
    int trips = 40;
    int trip_length = 10;
    std::vector<int> lengths{3, 5, 7};
    NoiseConfig noise;
    NetworkGenConfig network;
    EnsembleParams ensemble;
    SemisupParams semisup;
    int seed_extra = 20;          // labeled single-interval trips per seed
    double defense_factor = 5.0;  // defense amplitude in units of metro HRA
    int mixed_days = 8;           // extraction test days
    int mixed_train_days = 4;
    bool robustness = true;       // run the hand-shake and defense variants
    bool augment_reverse = true;  // train reverse-direction classes from time-reversed segments
};

struct Corpus {
    GeneratedNetwork net;
    std::vector<Trace> trips;
    std::vector<std::uint64_t> trip_seeds;
};

Corpus build_corpus(const BenchmarkConfig& cfg);

/// Random day of other modes interleaved with 1-2 metro rides.
std::vector<ScheduleItem> random_schedule(const MetroNetwork& network, std::uint64_t seed);

std::vector<int> distinctive_intervals(const GeneratedNetwork& net);

/// Labeled mixed days for mode-model training (training = true) or the
/// extraction test.
std::vector<Trace> mixed_days(const Corpus& corpus, const BenchmarkConfig& cfg, bool training);

/// Labeled rides through a seed interval and its neighbours, `seed_extra` of them.
std::vector<Trace> seed_rides(const Corpus& corpus, const BenchmarkConfig& cfg, int seed_interval);

/// Feature rows of the seed interval cut from a labeled ride at dwell centres.
std::vector<std::vector<double>> seed_features(const Trace& ride, int seed_interval, const FeatureConfig& fc);

std::vector<int> forward_intervals(const MetroNetwork& network);

/// Mean HRA over metro motion in the given trips.
double metro_hra_scale(const std::vector<Trace>& trips);

// ---------------------------------------------------------------------------
// Experiments

struct ExtractionReport {
    double coverage = 0.0;            // metro samples inside spans / metro samples
    std::size_t spans = 0;
    std::size_t false_positive_spans = 0;  // spans under 50% metro
    std::size_t windows = 0;
    std::size_t window_errors = 0;    // raw window labels disagreeing with the majority truth
    std::size_t refined_window_errors = 0;
};

ExtractionReport run_extraction(const Corpus& corpus, const BenchmarkConfig& cfg);

/// Trains the mode model from labeled days.
ModeModel train_mode_model(const std::vector<Trace>& days, const MetroNetwork& network);

struct SegmentationReport {
    std::vector<int> distances;
    double within_two = 0.0;  // fraction of trips with distance <= 2
};

SegmentationReport run_segmentation(const Corpus& corpus, const MetroNetwork& network);

struct LengthAccuracy {
    int length = 0;
    std::size_t runs = 0;
    std::size_t correct = 0;
    double accuracy() const { return runs ? static_cast<double>(correct) / runs : 0.0; }
};

/// Replaces the model row for a test segment. Receives the test trip index,
/// the absolute sample range in that trip and the model's row.
using TruthScorer = std::function<std::vector<double>(std::size_t trip, std::size_t start, std::size_t end,
                                                      const std::vector<double>& model_row)>;

/// One-hot row of the true interval with the largest overlap.
TruthScorer perfect_scorer(const Corpus& corpus);

struct SupervisedReport {
    std::vector<LengthAccuracy> accuracy;
    std::vector<LengthAccuracy> accuracy_no_shake;
    std::vector<LengthAccuracy> accuracy_defense;
    std::vector<std::vector<double>> confusion;  // forward intervals, percentages
    std::size_t reduced_runs = 0;
    std::size_t reduced_agree = 0;
    std::size_t shake_runs = 0;
    std::size_t shake_changed = 0;
    double defense_amp = 0.0;
    double mean_oob = 0.0;
};

SupervisedReport run_supervised(const Corpus& corpus, const BenchmarkConfig& cfg,
                                const TruthScorer& scorer = nullptr);

/// Pipeline-segmented trips ready for the bootstrap: one sequence per trip.
struct UnlabeledSet {
    std::vector<std::vector<EnuSample>> enus;
    std::vector<std::vector<Segment>> segments;
    FeatureConfig features;
    std::vector<SegmentSequence> sequences;
};

UnlabeledSet prepare_unlabeled(const std::vector<Trace>& trips, const MetroNetwork& network);

struct SemisupReport {
    BootstrapResult bootstrap;
    std::vector<LengthAccuracy> accuracy;
    std::size_t sequences = 0;
    std::size_t labeled_segments = 0;
    std::size_t correct_labels = 0;
    std::vector<int> seeds;
};

SemisupReport run_semisupervised(const Corpus& corpus, const BenchmarkConfig& cfg);

/// Training rows for a set of trips under truth segmentation.
struct TrainingData {
    Dataset data;
    FeatureConfig features;
};

/// With `augment_reverse`, every segment is also added time-reversed under
/// the opposite-direction label of the same track: world-frame acceleration
/// of a reverse traversal is the forward one played backwards.
TrainingData supervised_training_data(const std::vector<const Trace*>& trips, const MetroNetwork& network,
                                      bool augment_reverse = true, const FeatureConfig& base = {});

/// Same track travelled the other way.
int opposite_interval(const MetroNetwork& network, int id);

std::vector<EnuSample> time_reversed(std::span<const EnuSample> segment);

/// Evaluates every length-n subtrip of each trip with tolerant inference.
std::vector<LengthAccuracy> evaluate_subtrips(const std::vector<Trace>& trips, const IntervalEnsemble& model,
                                              const MetroNetwork& network, const std::vector<int>& lengths);

nlohmann::json to_json(const ExtractionReport& r);
nlohmann::json to_json(const SegmentationReport& r);
nlohmann::json to_json(const std::vector<LengthAccuracy>& r);
nlohmann::json to_json(const SupervisedReport& r);
nlohmann::json to_json(const SemisupReport& r);

}  // namespace subtrace
