#include "subtrace/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <cstdint>
#include <string>

namespace subtrace {

namespace {

double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

// Stable component id per mode name, independent of trace order.
int mode_group(const std::string& label) {
    std::uint32_t h = 2166136261u;
    for (unsigned char ch : label) h = (h ^ ch) * 16777619u;
    return static_cast<int>(h & 0x7fffffff);
}

double log_gauss(double x, double mu, double var) {
    const double d = x - mu;
    return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

}  // namespace

double ModeModel::log_odds(const WindowFeatures& f) const {
    const auto x = f.as_array();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    double best[2] = {kNegInf, kNegInf};
    std::vector<double> l(components.size());
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& comp = components[c];
        l[c] = comp.log_prior;
        for (int k = 0; k < 5; ++k) l[c] += log_gauss(x[k], comp.mean[k], comp.var[k]);
        auto& b = best[static_cast<int>(comp.label)];
        b = std::max(b, l[c]);
    }
    // log-sum-exp per label
    double acc[2] = {0.0, 0.0};
    for (std::size_t c = 0; c < components.size(); ++c) {
        const int lab = static_cast<int>(components[c].label);
        acc[lab] += std::exp(l[c] - best[lab]);
    }
    return (best[1] + std::log(acc[1])) - (best[0] + std::log(acc[0]));
}

ModeLabel ModeModel::predict(const WindowFeatures& f) const {
    return log_odds(f) > 0.0 ? ModeLabel::metro : ModeLabel::non_metro;
}

std::size_t extraction_window(const MetroNetwork& network) {
    const double m = std::floor(network.sample_rate * network.min_interval_duration() / 2.0);
    return static_cast<std::size_t>(std::max(1.0, m));
}

Thresholds metro_thresholds(std::span<const double> metro_hra) {
    std::vector<double> v(metro_hra.begin(), metro_hra.end());
    return {percentile(v, 0.50), percentile(v, 0.75), percentile(v, 0.90)};
}

WindowFeatures window_features(std::span<const double> hra, std::size_t start, std::size_t len,
                               const Thresholds& th) {
    if (len == 0 || start > hra.size() || len > hra.size() - start)
        throw ValidationError("window out of bounds");
    WindowFeatures f;
    double sum = 0.0;
    for (std::size_t i = start; i < start + len; ++i) {
        const double x = hra[i];
        sum += x;
        f.nvht1 += x > th[0];
        f.nvht2 += x > th[1];
        f.nvht3 += x > th[2];
    }
    f.mean = sum / static_cast<double>(len);
    double ss = 0.0;
    for (std::size_t i = start; i < start + len; ++i) ss += (hra[i] - f.mean) * (hra[i] - f.mean);
    f.variance = ss / static_cast<double>(len);
    return f;
}

ModeModel train_mode_classifier(std::span<const LabeledWindow> rows, const Thresholds& thresholds,
                                std::size_t window) {
    bool seen[2] = {false, false};
    for (const auto& r : rows) seen[static_cast<int>(r.label)] = true;
    if (!seen[0] || !seen[1]) throw ValidationError("mode classifier needs both metro and non-metro windows");

    // Component key: (label, group).
    std::vector<std::pair<ModeLabel, int>> keys;
    std::vector<std::size_t> member(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::pair<ModeLabel, int> key{rows[i].label, rows[i].group};
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) it = keys.insert(keys.end(), key);
        member[i] = static_cast<std::size_t>(it - keys.begin());
    }
    ModeModel m;
    m.window = window;
    m.thresholds = thresholds;
    m.components.resize(keys.size());
    std::vector<double> count(keys.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& comp = m.components[member[i]];
        const auto x = rows[i].features.as_array();
        count[member[i]] += 1.0;
        for (int k = 0; k < 5; ++k) comp.mean[k] += x[k];
    }
    for (std::size_t c = 0; c < keys.size(); ++c) {
        m.components[c].label = keys[c].first;
        m.components[c].log_prior = std::log(count[c] / static_cast<double>(rows.size()));
        for (auto& v : m.components[c].mean) v /= count[c];
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& comp = m.components[member[i]];
        const auto x = rows[i].features.as_array();
        for (int k = 0; k < 5; ++k) comp.var[k] += (x[k] - comp.mean[k]) * (x[k] - comp.mean[k]) / count[member[i]];
    }
    // Floor relative to the pooled spread: a mode whose counts are always zero
    // would otherwise get a near-delta density and swamp every other feature.
    std::array<double, 5> mean{}, pooled{};
    for (const auto& r : rows) {
        const auto x = r.features.as_array();
        for (int k = 0; k < 5; ++k) mean[k] += x[k] / static_cast<double>(rows.size());
    }
    for (const auto& r : rows) {
        const auto x = r.features.as_array();
        for (int k = 0; k < 5; ++k) pooled[k] += (x[k] - mean[k]) * (x[k] - mean[k]) / static_cast<double>(rows.size());
    }
    for (auto& comp : m.components)
        for (int k = 0; k < 5; ++k)
            comp.var[k] = std::max({comp.var[k], ModeModel::kRelativeFloor * pooled[k], ModeModel::kVarianceFloor});
    return m;
}

std::vector<ModeLabel> classify_windows(std::span<const double> hra, const ModeModel& model) {
    const std::size_t w = model.window;
    if (w == 0 || hra.size() < w) throw ValidationError("trace shorter than the extraction window");
    std::vector<ModeLabel> out;
    for (std::size_t s = 0; s < hra.size(); s += w) {
        const std::size_t len = std::min(w, hra.size() - s);
        out.push_back(model.predict(window_features(hra, s, len, model.thresholds)));
    }
    return out;
}

std::vector<ModeLabel> flip_isolated(std::span<const ModeLabel> labels) {
    std::vector<ModeLabel> out(labels.begin(), labels.end());
    const std::size_t n = out.size();
    if (n < 2) return out;
    // A window is isolated when it is flanked on both sides by the other label.
    auto pass = [&](ModeLabel target) {
        std::vector<ModeLabel> next = out;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (out[i] != target) continue;
            if (out[i - 1] != target && out[i + 1] != target) next[i] = target == ModeLabel::metro ? ModeLabel::non_metro : ModeLabel::metro;
        }
        out = std::move(next);
    };
    pass(ModeLabel::metro);
    pass(ModeLabel::non_metro);
    return out;
}

std::vector<MetroSpan> refine_boundaries(std::span<const ModeLabel> raw,
                                         std::span<const double> hra, const ModeModel& model) {
    const std::size_t w = model.window;
    const std::size_t n = hra.size();
    const auto labels = flip_isolated(raw);
    const std::size_t count = labels.size();
    auto is_metro_at = [&](std::size_t start) {
        return model.predict(window_features(hra, start, w, model.thresholds)) == ModeLabel::metro;
    };

    std::vector<MetroSpan> spans;
    for (std::size_t a = 0; a < count;) {
        if (labels[a] != ModeLabel::metro) {
            ++a;
            continue;
        }
        std::size_t b = a;
        while (b + 1 < count && labels[b + 1] == ModeLabel::metro) ++b;

        std::size_t start = 0;
        if (a > 0) {
            // Slide back one sample at a time until the window turns non-metro.
            start = a * w;
            for (std::size_t k = 1; k <= w && k <= a * w; ++k) {
                if (a * w - k + w > n) continue;  // the last window may be partial
                if (!is_metro_at(a * w - k)) {
                    start = a * w - k + w / 2;
                    break;
                }
            }
        }
        std::size_t end = n;
        if (b + 1 < count) {
            end = (b + 1) * w;
            for (std::size_t k = 1; k <= w && b * w + k + w <= n; ++k) {
                if (!is_metro_at(b * w + k)) {
                    end = b * w + k + w / 2;
                    break;
                }
            }
        }
        if (!spans.empty()) start = std::max(start, spans.back().end_index);
        end = std::min(end, n);
        if (end > start && end - start >= w) spans.push_back({start, end});
        a = b + 1;
    }
    return spans;
}

std::vector<MetroSpan> extract_metro_spans(std::span<const double> hra, const ModeModel& model) {
    if (hra.size() < model.window) return {};
    const auto labels = classify_windows(hra, model);
    return refine_boundaries(labels, hra, model);
}

std::vector<bool> metro_mask(std::size_t n, double rate, const std::vector<TruthRange>& truth) {
    std::vector<bool> mask(n, false);
    for (const auto& r : truth) {
        if (r.label != mode_label("metro")) continue;
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::round(r.start * rate)));
        const auto hi = std::min(n, static_cast<std::size_t>(std::max(0.0, std::round(r.end * rate))));
        for (std::size_t i = lo; i < hi; ++i) mask[i] = true;
    }
    return mask;
}

std::vector<LabeledWindow> labeled_windows(std::span<const double> hra, double rate,
                                           const std::vector<TruthRange>& truth, std::size_t w,
                                           const Thresholds& th) {
    std::vector<LabeledWindow> out;
    for (const auto& r : truth) {
        if (!is_mode_label(r.label)) continue;
        const bool metro = r.label == mode_label("metro");
        const int group = mode_group(r.label);
        const auto lo = static_cast<std::size_t>(std::round(r.start * rate));
        const auto hi = std::min(hra.size(), static_cast<std::size_t>(std::round(r.end * rate)));
        for (std::size_t s = lo; s + w <= hi; s += w)
            out.push_back({window_features(hra, s, w, th), metro ? ModeLabel::metro : ModeLabel::non_metro, group});
    }
    return out;
}

}  // namespace subtrace
