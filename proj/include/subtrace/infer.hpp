#pragma once

// Trace inference by voting over continuous interval runs.

#include <functional>
#include <span>
#include <vector>

#include "subtrace/classify.hpp"
#include "subtrace/segment.hpp"

namespace subtrace {

/// A run of `length` intervals starting at `start` (position along
/// `direction`). Directed interval ids follow MetroNetwork: forward ids are
/// positions, reverse ids are line + position.
struct TraceHypothesis {
    Direction direction = Direction::forward;
    int start = 0;
    int length = 1;
    double score = 0.0;

    int interval_at(int offset, int line) const {
        return (direction == Direction::forward ? 0 : line) + start + offset;
    }
    int start_interval(int line) const { return interval_at(0, line); }
    bool same_run(const TraceHypothesis& o) const {
        return direction == o.direction && start == o.start && length == o.length;
    }
};

enum class InferMode { full, reduced };

std::vector<TraceHypothesis> enumerate_candidates(int line, int n);

/// Sum of P[j][interval_at(j)] over the hypothesis.
double vote(const ProbabilityMatrix& P, const TraceHypothesis& h, int line);

std::vector<TraceHypothesis> reduce_domain(const ProbabilityMatrix& P, int n, int line, int top_k = 3);

/// Deterministic ordering: higher score, then smaller start id, then forward.
bool better(const TraceHypothesis& a, const TraceHypothesis& b, int line);

TraceHypothesis infer_trace(const ProbabilityMatrix& P, int line, InferMode mode = InferMode::full);

/// Scores candidates and returns them best-first.
std::vector<TraceHypothesis> rank_candidates(const ProbabilityMatrix& P, int line, InferMode mode);

struct TolerantConfig {
    InferMode mode = InferMode::full;
    double snap_seconds = 10.0;
    bool enable_neighbors = true;  // n-1 / n+1 families
};

struct TolerantResult {
    TraceHypothesis best;            // score is the mean per-segment vote
    int family = 0;                  // -1, 0 or +1 relative to the detected segment count
    std::vector<Segment> segments;   // detected segmentation, span-relative
    ProbabilityMatrix P;             // rows for the detected segments
    std::vector<TraceHypothesis> top;  // best few of the n-family
};

/// Probability row for the span-relative sample range [start, end).
using RowScorer = std::function<std::vector<double>(std::size_t start, std::size_t end)>;

/// Classifies segments of one metro span and resolves the trip, hedging
/// against one missed or spurious stop.
TolerantResult infer_with_segment_tolerance(std::span<const EnuSample> span, const RowScorer& scorer,
                                            std::size_t smooth_k, std::size_t min_segment,
                                            const SegmenterParams& segmenter,
                                            const MetroNetwork& network,
                                            const TolerantConfig& cfg = {});

/// Ensemble-backed overload.
TolerantResult infer_with_segment_tolerance(std::span<const EnuSample> span,
                                            const IntervalEnsemble& ensemble,
                                            const SegmenterParams& segmenter,
                                            const MetroNetwork& network,
                                            const TolerantConfig& cfg = {});

/// Shortest segment the feature extractor accepts under `cfg`.
std::size_t min_segment_length(const FeatureConfig& cfg);

/// Segment features for one index range; minimum length is enforced by the caller.
std::vector<SegmentFeatures> segment_features(std::span<const EnuSample> span,
                                              const std::vector<Segment>& segments,
                                              const FeatureConfig& cfg);

}  // namespace subtrace
