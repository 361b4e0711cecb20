#include "subtrace/infer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace subtrace {

std::vector<TraceHypothesis> enumerate_candidates(int line, int n) {
    if (n < 1 || n > line) throw ValidationError("run length must lie in [1, line length]");
    std::vector<TraceHypothesis> out;
    for (Direction dir : {Direction::forward, Direction::reverse})
        for (int s = 0; s + n <= line; ++s) out.push_back({dir, s, n, 0.0});
    return out;
}

double vote(const ProbabilityMatrix& P, const TraceHypothesis& h, int line) {
    if (static_cast<int>(P.rows()) != h.length) throw ValidationError("hypothesis length differs from segment count");
    if (static_cast<int>(P.cols()) < 2 * line) throw ValidationError("probability matrix narrower than the network");
    double s = 0.0;
    for (int j = 0; j < h.length; ++j) s += P.at(j, h.interval_at(j, line));
    return s;
}

std::vector<TraceHypothesis> reduce_domain(const ProbabilityMatrix& P, int n, int line, int top_k) {
    std::vector<TraceHypothesis> out;
    auto seen = [&](const TraceHypothesis& h) {
        return std::any_of(out.begin(), out.end(), [&](const TraceHypothesis& o) { return o.same_run(h); });
    };
    for (std::size_t i = 0; i < P.rows(); ++i) {
        std::vector<int> cols(P.cols());
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = static_cast<int>(j);
        std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) { return P.at(i, a) > P.at(i, b); });
        for (int r = 0; r < top_k && r < static_cast<int>(cols.size()); ++r) {
            const int id = cols[r];
            const Direction dir = id < line ? Direction::forward : Direction::reverse;
            const int start = (id % line) - static_cast<int>(i);
            if (start < 0 || start + n > line) continue;
            TraceHypothesis h{dir, start, n, 0.0};
            if (!seen(h)) out.push_back(h);
        }
    }
    return out;
}

bool better(const TraceHypothesis& a, const TraceHypothesis& b, int line) {
    if (a.score != b.score) return a.score > b.score;
    if (a.start_interval(line) != b.start_interval(line)) return a.start_interval(line) < b.start_interval(line);
    return a.direction == Direction::forward && b.direction != Direction::forward;
}

std::vector<TraceHypothesis> rank_candidates(const ProbabilityMatrix& P, int line, InferMode mode) {
    const int n = static_cast<int>(P.rows());
    auto cands = mode == InferMode::full ? enumerate_candidates(line, n) : reduce_domain(P, n, line);
    for (auto& h : cands) h.score = vote(P, h, line);
    std::sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) { return better(a, b, line); });
    return cands;
}

TraceHypothesis infer_trace(const ProbabilityMatrix& P, int line, InferMode mode) {
    const auto ranked = rank_candidates(P, line, mode);
    if (ranked.empty()) throw ValidationError("no candidate hypotheses");
    return ranked.front();
}

std::vector<SegmentFeatures> segment_features(std::span<const EnuSample> span,
                                              const std::vector<Segment>& segments,
                                              const FeatureConfig& cfg) {
    std::vector<SegmentFeatures> out;
    out.reserve(segments.size());
    for (const auto& s : segments) out.push_back(extract_features(span.subspan(s.start_index, s.length()), cfg));
    return out;
}

namespace {

// Cuts [0, n) in proportion to the map durations of the hypothesis's
// intervals, each cut snapped to the quietest nearby sample.
std::vector<Segment> recut(const TraceHypothesis& h, const MetroNetwork& net, std::span<const double> hra,
                           std::size_t snap, std::size_t min_len) {
    const int line = net.line_length();
    const double dwell = 0.5 * (net.dwell_min + net.dwell_max);
    std::vector<double> dur;
    double total = 0.0;
    for (int j = 0; j < h.length; ++j) {
        const auto& iv = net.intervals[h.interval_at(j, line)];
        dur.push_back(0.5 * (iv.min_duration + iv.max_duration));
        total += dur.back();
    }
    total += dwell * (h.length - 1);
    const std::size_t n = hra.size();
    const double scale = static_cast<double>(n) / total;

    std::vector<std::size_t> points;
    double t = 0.0;
    for (int j = 0; j + 1 < h.length; ++j) {
        t += dur[j];
        const auto c = static_cast<std::size_t>(std::lround((t + 0.5 * dwell) * scale));
        t += dwell;
        const std::size_t lo = c > snap ? c - snap : 0;
        const std::size_t hi = std::min(n, c + snap + 1);
        std::size_t best = std::min(c, n - 1);
        for (std::size_t i = lo; i < hi; ++i)
            if (hra[i] < hra[best]) best = i;
        points.push_back(best);
    }
    auto segs = to_segments(0, n, points);
    if (static_cast<int>(segs.size()) != h.length) return {};
    for (const auto& s : segs)
        if (s.length() < min_len) return {};
    return segs;
}

}  // namespace

std::size_t min_segment_length(const FeatureConfig& cfg) {
    std::size_t m = 8;
    for (std::size_t w : cfg.peak_windows) m = std::max(m, w);
    return m;
}

TolerantResult infer_with_segment_tolerance(std::span<const EnuSample> span,
                                            const IntervalEnsemble& ensemble,
                                            const SegmenterParams& segmenter,
                                            const MetroNetwork& network, const TolerantConfig& cfg) {
    const auto& fc = ensemble.feature_config;
    RowScorer scorer = [&](std::size_t s, std::size_t e) {
        return ensemble.predict_row(extract_features(span.subspan(s, e - s), fc));
    };
    return infer_with_segment_tolerance(span, scorer, fc.smooth_k, min_segment_length(fc), segmenter,
                                        network, cfg);
}

TolerantResult infer_with_segment_tolerance(std::span<const EnuSample> span, const RowScorer& scorer,
                                            std::size_t smooth_k, std::size_t min_len,
                                            const SegmenterParams& segmenter,
                                            const MetroNetwork& network, const TolerantConfig& cfg) {
    if (span.size() < min_len) throw ValidationError("metro span too short to classify");
    const int line = network.line_length();

    const auto hra = smoothed_hra(span, smooth_k);
    const auto params = with_threshold(segmenter, hra);
    auto points = find_final_segment_points(hra, params).points;
    TolerantResult out;
    out.segments = to_segments(0, span.size(), points);
    // Never hand the classifier more segments than the line has intervals.
    while (static_cast<int>(out.segments.size()) > line) {
        points.pop_back();
        out.segments = to_segments(0, span.size(), points);
    }

    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cache;
    auto row_for = [&](const Segment& s) -> const std::vector<double>& {
        const auto key = std::make_pair(s.start_index, s.end_index);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, scorer(s.start_index, s.end_index)).first;
        return it->second;
    };

    std::vector<std::vector<double>> rows;
    for (const auto& s : out.segments) rows.push_back(row_for(s));
    out.P = ProbabilityMatrix::from_rows(rows);
    const int n = static_cast<int>(out.segments.size());

    auto ranked = rank_candidates(out.P, line, cfg.mode);
    for (auto& h : ranked) h.score /= n;
    if (ranked.empty()) throw ValidationError("no candidate hypotheses");
    out.top.assign(ranked.begin(), ranked.begin() + std::min<std::size_t>(3, ranked.size()));
    out.best = ranked.front();
    out.family = 0;
    if (!cfg.enable_neighbors) return out;

    const auto snap = static_cast<std::size_t>(std::lround(cfg.snap_seconds * network.sample_rate));
    std::vector<TraceHypothesis> variants;
    auto add = [&](TraceHypothesis v) {
        if (v.length < 1 || v.start < 0 || v.start + v.length > line) return;
        v.score = 0.0;
        for (const auto& o : variants)
            if (o.same_run(v)) return;
        variants.push_back(v);
    };
    for (const auto& h : ranked) {
        add({h.direction, h.start, h.length + 1});
        add({h.direction, h.start - 1, h.length + 1});
        if (h.length > 1) {
            add({h.direction, h.start, h.length - 1});
            add({h.direction, h.start + 1, h.length - 1});
        }
    }
    for (auto& v : variants) {
        const auto segs = recut(v, network, hra, snap, min_len);
        if (segs.empty()) continue;
        double s = 0.0;
        for (int j = 0; j < v.length; ++j) s += row_for(segs[j])[v.interval_at(j, line)];
        v.score = s / v.length;
        if (better(v, out.best, line)) {
            out.best = v;
            out.family = v.length - n;
        }
    }
    return out;
}

}  // namespace subtrace
