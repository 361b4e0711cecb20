#include "subtrace/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace subtrace {

std::size_t FeatureConfig::dimension() const {
    return 3 * kStatsPerComponent + 1 + (use_peaks ? 3 * 4 * kPeakCount : 0);
}

std::vector<double> SegmentFeatures::to_vector(const FeatureConfig& cfg) const {
    std::vector<double> v;
    v.reserve(cfg.dimension());
    for (const auto& s : stats) {
        v.insert(v.end(), {s.mean, s.max, s.std, s.mav});
        v.insert(v.end(), s.nvht.begin(), s.nvht.end());
        v.insert(v.end(), s.fft.begin(), s.fft.end());
        v.push_back(s.spectral_entropy);
        v.push_back(s.spectrum_peak_pos);
    }
    v.push_back(length);
    if (cfg.use_peaks) {
        for (const auto& p : peaks) {
            for (const auto& e : p.peaks) v.insert(v.end(), {e.amplitude, e.position});
            for (const auto& e : p.valleys) v.insert(v.end(), {e.amplitude, e.position});
        }
    }
    return v;
}

std::vector<double> smooth(std::span<const double> x, std::size_t k) {
    if (x.empty()) throw ValidationError("cannot smooth an empty series");
    if (k == 0) throw ValidationError("smoothing window must be positive");
    if (k % 2 == 0) ++k;
    const std::size_t h = k / 2;
    const std::size_t n = x.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= h ? i - h : 0;
        const std::size_t hi = std::min(n, i + h + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

namespace {

// In-place iterative radix-2 Cooley-Tukey; size must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

std::vector<double> spectrum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<std::complex<double>> a(next_pow2(n));
    for (std::size_t i = 0; i < n; ++i) a[i] = x[i] - mean;
    fft(a);
    std::vector<double> mag(a.size() / 2 + 1);
    for (std::size_t j = 0; j < mag.size(); ++j) mag[j] = std::abs(a[j]) / static_cast<double>(n);
    return mag;
}

StatBlock statistical_features(std::span<const double> x, const std::array<double, 3>& th) {
    if (x.size() < 8) throw ValidationError("statistical features need at least 8 samples");
    const double n = static_cast<double>(x.size());
    StatBlock b;
    b.max = x[0];
    for (double v : x) {
        b.mean += v;
        b.mav += std::abs(v);
        b.max = std::max(b.max, v);
        for (int k = 0; k < 3; ++k) b.nvht[k] += std::abs(v) > th[k];
    }
    b.mean /= n;
    b.mav /= n;
    for (double v : x) b.std += (v - b.mean) * (v - b.mean);
    b.std = std::sqrt(b.std / n);

    const auto mag = spectrum(x);
    for (std::size_t j = 0; j < kFftBins; ++j) b.fft[j] = j + 1 < mag.size() ? mag[j + 1] : 0.0;

    double total = 0.0;
    std::size_t peak = 0;
    for (std::size_t j = 0; j < mag.size(); ++j) {
        total += mag[j] * mag[j];
        if (mag[j] > mag[peak]) peak = j;
    }
    b.spectrum_peak_pos = static_cast<double>(peak);
    if (total > 0.0) {
        for (double m : mag) {
            const double p = m * m / total;
            if (p > 0.0) b.spectral_entropy -= p * std::log(p);
        }
    }
    return b;
}

namespace {

struct Cluster {
    std::size_t index;
    double amplitude;
    int wins;
};

// Ranks extrema of `sign * x` across window sizes; returns up to 3 clusters
// ordered by (wins, amplitude), then re-sorted by amplitude.
std::vector<Cluster> rank_extrema(std::span<const double> x, const std::vector<std::size_t>& sizes,
                                  double sign) {
    struct Hit {
        std::size_t index;
        double value;
    };
    std::vector<Hit> hits;
    for (std::size_t w : sizes) {
        std::vector<Hit> local;
        for (std::size_t s = 0; s < x.size(); s += w) {
            const std::size_t e = std::min(x.size(), s + w);
            std::size_t best = s;
            for (std::size_t i = s + 1; i < e; ++i)
                if (sign * x[i] > sign * x[best]) best = i;
            local.push_back({best, sign * x[best]});
        }
        std::stable_sort(local.begin(), local.end(),
                         [](const Hit& a, const Hit& b) { return a.value > b.value; });
        if (local.size() > kPeakCount) local.resize(kPeakCount);
        hits.insert(hits.end(), local.begin(), local.end());
    }
    // Merge locations closer than the smallest window; strongest hit anchors the cluster.
    const std::size_t merge = *std::min_element(sizes.begin(), sizes.end());
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return a.value > b.value || (a.value == b.value && a.index < b.index);
    });
    std::vector<Cluster> clusters;
    for (const auto& h : hits) {
        auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
            return (c.index > h.index ? c.index - h.index : h.index - c.index) < merge;
        });
        if (it != clusters.end()) ++it->wins;
        else clusters.push_back({h.index, h.value, 1});
    }
    std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        return a.wins > b.wins || (a.wins == b.wins && a.amplitude > b.amplitude);
    });
    if (clusters.size() > kPeakCount) clusters.resize(kPeakCount);
    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const Cluster& a, const Cluster& b) { return a.amplitude > b.amplitude; });
    return clusters;
}

}  // namespace

PeakBlock peak_features(std::span<const double> x, const std::vector<std::size_t>& sizes) {
    if (sizes.empty() || std::find(sizes.begin(), sizes.end(), 0u) != sizes.end())
        throw ValidationError("peak window sizes must be positive");
    const std::size_t largest = *std::max_element(sizes.begin(), sizes.end());
    if (x.size() < largest) throw ValidationError("series shorter than the largest peak window");
    const double span = x.size() > 1 ? static_cast<double>(x.size() - 1) : 1.0;

    PeakBlock out;
    auto fill = [&](std::array<Extremum, kPeakCount>& dst, double sign) {
        const auto c = rank_extrema(x, sizes, sign);
        for (std::size_t r = 0; r < kPeakCount; ++r) {
            // Pad short rankings with the weakest found extremum.
            const auto& src = c[std::min(r, c.size() - 1)];
            dst[r] = {x[src.index], static_cast<double>(src.index) / span};
        }
    };
    fill(out.peaks, 1.0);
    fill(out.valleys, -1.0);
    return out;
}

SegmentFeatures extract_features(std::span<const EnuSample> seg, const FeatureConfig& cfg) {
    std::array<std::vector<double>, 3> comp;
    for (auto& c : comp) c.reserve(seg.size());
    for (const auto& e : seg) {
        comp[0].push_back(e.eca);
        comp[1].push_back(e.nca);
        comp[2].push_back(e.vca);
    }
    SegmentFeatures f;
    f.length = static_cast<double>(seg.size());
    for (int a = 0; a < 3; ++a) {
        const auto s = smooth(comp[a], cfg.smooth_k);
        f.stats[a] = statistical_features(s, cfg.thresholds[a]);
        if (cfg.use_peaks) f.peaks[a] = peak_features(s, cfg.peak_windows);
    }
    return f;
}

FeatureConfig fit_feature_config(const std::vector<std::span<const EnuSample>>& segments,
                                 FeatureConfig base) {
    std::array<std::vector<double>, 3> vals;
    for (const auto& seg : segments) {
        if (seg.empty()) continue;
        std::array<std::vector<double>, 3> comp;
        for (const auto& e : seg) {
            comp[0].push_back(e.eca);
            comp[1].push_back(e.nca);
            comp[2].push_back(e.vca);
        }
        for (int a = 0; a < 3; ++a)
            for (double v : smooth(comp[a], base.smooth_k)) vals[a].push_back(std::abs(v));
    }
    for (int a = 0; a < 3; ++a) {
        auto& v = vals[a];
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const double qs[3] = {0.50, 0.75, 0.90};
        for (int k = 0; k < 3; ++k)
            base.thresholds[a][k] = v[static_cast<std::size_t>(qs[k] * static_cast<double>(v.size() - 1))];
    }
    return base;
}

std::vector<double> smoothed_hra(std::span<const EnuSample> enu, std::size_t k) {
    if (enu.empty()) return {};
    std::vector<double> e, n;
    e.reserve(enu.size());
    n.reserve(enu.size());
    for (const auto& s : enu) {
        e.push_back(s.eca);
        n.push_back(s.nca);
    }
    const auto se = smooth(e, k);
    const auto sn = smooth(n, k);
    std::vector<double> out(enu.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::hypot(se[i], sn[i]);
    return out;
}

}  // namespace subtrace
