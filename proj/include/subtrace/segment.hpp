#pragma once

// Stop-slot segmentation of a metro span into station-interval segments.

#include <cstddef>
#include <span>
#include <vector>

#include "subtrace/model.hpp"

namespace subtrace {

struct SegmenterParams {
    double T1 = 0.0;          // stop-slot threshold, m/s^2
    double delta = 0.0;       // T1 increment per escalation
    std::size_t L_W = 0;      // minimum stop length, samples
    std::size_t L_min = 0;    // shortest interval, samples
    std::size_t L_max = 0;    // longest interval plus one stop, samples
    double quorum = 0.95;
    double requorum = 0.80;   // quorum for re-search passes
    int max_escalations = 8;

    void validate() const;
};

/// Length parameters from the network; T1/delta filled by with_threshold().
SegmenterParams segmenter_params(const MetroNetwork& network);

/// T1 = 30th percentile of the span's HRA, delta = 10% of T1.
SegmenterParams with_threshold(SegmenterParams p, std::span<const double> hra);

/// One scan of [start, end). Returned points are stop-window centres.
std::vector<std::size_t> find_seg_points(std::span<const double> hra, std::size_t start,
                                         std::size_t end, const SegmenterParams& params,
                                         double T1, double quorum);

struct SegPointsResult {
    std::vector<std::size_t> points;
    double final_T1 = 0.0;
    int escalations = 0;
    bool capped = false;  // safety cap hit with gaps still too long
};

SegPointsResult find_final_segment_points(std::span<const double> hra, const SegmenterParams& params);

/// k points inside [start, end) give k+1 contiguous segments.
std::vector<Segment> to_segments(std::size_t start, std::size_t end,
                                 const std::vector<std::size_t>& points);

}  // namespace subtrace
