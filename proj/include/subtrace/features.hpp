#pragma once

// Segment feature vectors: smoothing, per-component statistics (mean, max,
// std, mav, threshold counts, FFT bins 1..6, spectral entropy, spectrum
// peak) and multi-scale peak/valley features.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "subtrace/model.hpp"

namespace subtrace {

inline constexpr std::size_t kFftBins = 6;
inline constexpr std::size_t kStatsPerComponent = 15;
inline constexpr std::size_t kPeakCount = 3;

struct FeatureConfig {
    std::size_t smooth_k = 9;
    std::vector<std::size_t> peak_windows{10, 20, 40};
    /// |value| thresholds per component (ECA, NCA, VCA) for nvht1..3.
    std::array<std::array<double, 3>, 3> thresholds{};
    bool use_peaks = true;

    /// 3 * 15 + 1 statistical values, plus 3 * 12 peak values when enabled.
    std::size_t dimension() const;
    bool operator==(const FeatureConfig&) const = default;
};

struct StatBlock {
    double mean = 0.0, max = 0.0, std = 0.0, mav = 0.0;
    std::array<double, 3> nvht{};
    std::array<double, kFftBins> fft{};
    double spectral_entropy = 0.0;
    double spectrum_peak_pos = 0.0;  // bin index
};

struct Extremum {
    double amplitude = 0.0;
    double position = 0.0;  // fraction of the segment in [0, 1]
};

struct PeakBlock {
    std::array<Extremum, kPeakCount> peaks{};    // largest first
    std::array<Extremum, kPeakCount> valleys{};  // smallest first
};

struct SegmentFeatures {
    std::array<StatBlock, 3> stats{};
    double length = 0.0;  // samples
    std::array<PeakBlock, 3> peaks{};

    std::vector<double> to_vector(const FeatureConfig& cfg) const;
};

/// Centered moving average with truncated edge windows. Even k is widened to k+1.
std::vector<double> smooth(std::span<const double> x, std::size_t k);

/// Magnitudes |X_j| / n of the mean-removed series zero-padded to a power of two,
/// for j = 0..N/2.
std::vector<double> spectrum(std::span<const double> x);

StatBlock statistical_features(std::span<const double> x, const std::array<double, 3>& thresholds);

PeakBlock peak_features(std::span<const double> x, const std::vector<std::size_t>& window_sizes);

SegmentFeatures extract_features(std::span<const EnuSample> segment, const FeatureConfig& cfg);

/// Fits the nvht thresholds (50/75/90th percentiles of smoothed |component|)
/// over training segments.
FeatureConfig fit_feature_config(const std::vector<std::span<const EnuSample>>& segments,
                                 FeatureConfig base = {});

/// Smoothed horizontal resultant acceleration from smoothed E/N components.
std::vector<double> smoothed_hra(std::span<const EnuSample> enu, std::size_t k);

}  // namespace subtrace
