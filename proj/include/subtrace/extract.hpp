#pragma once

// Metro / non-metro window classification over an HRA stream and the
// consecutive-window boundary refinement.

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "subtrace/model.hpp"

namespace subtrace {

struct WindowFeatures {
    double mean = 0.0;
    double variance = 0.0;
    double nvht1 = 0.0;  // samples strictly above T_a
    double nvht2 = 0.0;  // ... above T_b
    double nvht3 = 0.0;  // ... above T_c

    std::array<double, 5> as_array() const { return {mean, variance, nvht1, nvht2, nvht3}; }
    bool operator==(const WindowFeatures&) const = default;
};

enum class ModeLabel { non_metro = 0, metro = 1 };

struct MetroSpan {
    std::size_t start_index = 0;
    std::size_t end_index = 0;  // exclusive

    std::size_t length() const { return end_index - start_index; }
    bool operator==(const MetroSpan&) const = default;
};

using Thresholds = std::array<double, 3>;

/// One Gaussian naive-Bayes component. Each binary label may own several
/// components (one per source mode) so the non-metro class is not forced
/// into a single Gaussian.
struct ModeComponent {
    ModeLabel label = ModeLabel::non_metro;
    double log_prior = 0.0;
    std::array<double, 5> mean{};
    std::array<double, 5> var{};
};

/// Gaussian naive Bayes over the five window features.
struct ModeModel {
    static constexpr int kVersion = 1;
    static constexpr double kVarianceFloor = 1e-6;
    static constexpr double kRelativeFloor = 1e-2;  // fraction of pooled variance

    std::size_t window = 0;
    Thresholds thresholds{};
    std::vector<ModeComponent> components;

    /// log P(metro | x) - log P(non-metro | x).
    double log_odds(const WindowFeatures& f) const;
    ModeLabel predict(const WindowFeatures& f) const;
};

/// Extraction window m = floor(rate * shortest interval / 2).
std::size_t extraction_window(const MetroNetwork& network);

/// 50th / 75th / 90th percentiles of metro HRA.
Thresholds metro_thresholds(std::span<const double> metro_hra);

WindowFeatures window_features(std::span<const double> hra, std::size_t start, std::size_t len,
                               const Thresholds& thresholds);

struct LabeledWindow {
    WindowFeatures features;
    ModeLabel label = ModeLabel::non_metro;
    int group = -1;  // source-mode component; -1 means one component per label
};

/// Rows with equal (label, group) share a component.
ModeModel train_mode_classifier(std::span<const LabeledWindow> rows, const Thresholds& thresholds,
                                std::size_t window);

/// Disjoint stride-m windows; a trailing partial window is classified on its own.
std::vector<ModeLabel> classify_windows(std::span<const double> hra, const ModeModel& model);

std::vector<MetroSpan> refine_boundaries(std::span<const ModeLabel> labels,
                                         std::span<const double> hra, const ModeModel& model);

/// Flips isolated windows of either label; exposed for testing.
std::vector<ModeLabel> flip_isolated(std::span<const ModeLabel> labels);

/// classify_windows + refine_boundaries. Empty when |hra| < m.
std::vector<MetroSpan> extract_metro_spans(std::span<const double> hra, const ModeModel& model);

/// Training windows cut from a labeled trace: every stride-m window that lies
/// entirely inside one top-level mode range, grouped by mode name.
std::vector<LabeledWindow> labeled_windows(std::span<const double> hra, double sample_rate,
                                           const std::vector<TruthRange>& truth, std::size_t window,
                                           const Thresholds& thresholds);

/// Per-sample metro flag derived from "mode:" truth ranges.
std::vector<bool> metro_mask(std::size_t n, double sample_rate, const std::vector<TruthRange>& truth);

}  // namespace subtrace
