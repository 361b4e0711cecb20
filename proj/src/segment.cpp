#include "subtrace/segment.hpp"

#include <algorithm>
#include <cmath>

#include "subtrace/log.hpp"

namespace subtrace {

void SegmenterParams::validate() const {
    if (!(T1 > 0.0)) throw ValidationError("T1 must be positive");
    if (!(quorum > 0.0 && quorum <= 1.0) || !(requorum > 0.0 && requorum <= 1.0))
        throw ValidationError("quorum must lie in (0, 1]");
    if (!(L_W > 0 && L_W < L_min && L_min < L_max))
        throw ValidationError("segmenter lengths must satisfy 0 < L_W < L_min < L_max");
}

SegmenterParams segmenter_params(const MetroNetwork& network) {
    const double rate = network.sample_rate;
    SegmenterParams p;
    p.L_W = static_cast<std::size_t>(std::lround(network.dwell_min * rate));
    p.L_min = static_cast<std::size_t>(std::lround(network.min_interval_duration() * rate));
    p.L_max = static_cast<std::size_t>(
        std::lround((network.max_interval_duration() + network.dwell_max) * rate));
    return p;
}

SegmenterParams with_threshold(SegmenterParams p, std::span<const double> hra) {
    std::vector<double> v(hra.begin(), hra.end());
    double t = 0.0;
    if (!v.empty()) {
        const std::size_t k = static_cast<std::size_t>(0.3 * static_cast<double>(v.size() - 1));
        std::nth_element(v.begin(), v.begin() + k, v.end());
        t = v[k];
    }
    p.T1 = std::max(t, 1e-9);
    p.delta = 0.1 * p.T1;
    return p;
}

std::vector<std::size_t> find_seg_points(std::span<const double> hra, std::size_t start,
                                         std::size_t end, const SegmenterParams& p, double T1,
                                         double quorum) {
    std::vector<std::size_t> points;
    end = std::min(end, hra.size());
    const std::size_t lw = p.L_W;
    if (lw == 0 || start >= end || end - start < lw) return points;

    // Prefix sums over [start, end) for below-threshold counts and window means.
    const std::size_t n = end - start;
    std::vector<std::size_t> below(n + 1, 0);
    std::vector<double> sum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        below[i + 1] = below[i] + (hra[start + i] < T1 ? 1 : 0);
        sum[i + 1] = sum[i] + hra[start + i];
    }
    const double need = quorum * static_cast<double>(lw);
    std::size_t i = 0;
    while (i + lw <= n) {
        if (static_cast<double>(below[i + lw] - below[i]) > need) {
            std::size_t best = i;
            double best_sum = sum[i + lw] - sum[i];
            for (std::size_t s = i + 1; s < i + lw / 2 && s + lw <= n; ++s) {
                const double v = sum[s + lw] - sum[s];
                if (v < best_sum) {
                    best_sum = v;
                    best = s;
                }
            }
            points.push_back(start + best + lw / 2);
            i = best + p.L_min;
        } else {
            ++i;
        }
    }
    return points;
}

SegPointsResult find_final_segment_points(std::span<const double> hra, const SegmenterParams& p) {
    p.validate();
    SegPointsResult r;
    r.final_T1 = p.T1;
    const std::size_t n = hra.size();
    if (n < p.L_min) return r;
    r.points = find_seg_points(hra, 0, n, p, p.T1, p.quorum);

    auto long_gaps = [&](const std::vector<std::size_t>& pts) {
        std::vector<std::pair<std::size_t, std::size_t>> gaps;
        std::size_t prev = 0;
        for (std::size_t k = 0; k <= pts.size(); ++k) {
            const std::size_t next = k < pts.size() ? pts[k] : n;
            if (next - prev > p.L_max) gaps.emplace_back(prev, next);
            prev = next;
        }
        return gaps;
    };

    double T1 = p.T1;
    auto gaps = long_gaps(r.points);
    while (!gaps.empty()) {
        if (r.escalations >= p.max_escalations) {
            r.capped = true;
            spdlog::debug("segmentation: T1 cap reached with {} long gaps", gaps.size());
            break;
        }
        T1 += p.delta;
        ++r.escalations;
        for (const auto& [g0, g1] : gaps) {
            const std::size_t lo = g0 + p.L_min;
            const std::size_t hi = g1 > p.L_min ? g1 - p.L_min : 0;
            if (hi <= lo) continue;
            auto extra = find_seg_points(hra, lo, hi, p, T1, p.requorum);
            r.points.insert(r.points.end(), extra.begin(), extra.end());
        }
        std::sort(r.points.begin(), r.points.end());
        gaps = long_gaps(r.points);
    }
    r.final_T1 = T1;
    return r;
}

std::vector<Segment> to_segments(std::size_t start, std::size_t end,
                                 const std::vector<std::size_t>& points) {
    std::vector<Segment> out;
    std::size_t prev = start;
    for (std::size_t p : points) {
        if (p <= prev || p >= end) continue;
        out.push_back({prev, p, std::nullopt});
        prev = p;
    }
    if (end > prev) out.push_back({prev, end, std::nullopt});
    return out;
}

}  // namespace subtrace
