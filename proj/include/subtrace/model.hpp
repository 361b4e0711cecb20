#pragma once

// Domain types shared across the pipeline plus the on-disk formats for
// traces (JSON-lines) and metro networks (single JSON document).

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace subtrace {

inline constexpr double kGravity = 9.81;
inline constexpr double kDefaultSampleRate = 10.0;

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

using Vec3 = std::array<double, 3>;

/// One accelerometer + orientation reading in the phone screen frame.
/// `orient` holds (alpha, beta, gamma) in degrees, normalized to
/// alpha in [-90, 90], beta in [-180, 180], gamma in [0, 360).
struct SensorSample {
    double t = 0.0;
    Vec3 acc{};
    Vec3 orient{};

    bool operator==(const SensorSample&) const = default;
};

/// Acceleration in the static East-North-Up frame with gravity removed.
struct EnuSample {
    double t = 0.0;
    double eca = 0.0;
    double nca = 0.0;
    double vca = 0.0;
    double hra = 0.0;
};

enum class Direction { forward, reverse };

const char* to_string(Direction d);

struct StationInterval {
    int id = 0;
    std::string from_station;
    std::string to_station;
    double min_duration = 0.0;
    double max_duration = 0.0;
    Direction direction = Direction::forward;

    bool operator==(const StationInterval&) const = default;
};

/// A single metro line. `intervals` lists the forward direction in travel
/// order (ids 0..L-1) followed by the reverse direction in travel order
/// (ids L..2L-1), so ids along one direction are consecutive.
struct MetroNetwork {
    std::string name;
    double sample_rate = kDefaultSampleRate;
    std::vector<StationInterval> intervals;
    double dwell_min = 25.0;
    double dwell_max = 40.0;

    bool operator==(const MetroNetwork&) const = default;

    /// Number of intervals in one direction.
    int line_length() const { return static_cast<int>(intervals.size() / 2); }
    int interval_count() const { return static_cast<int>(intervals.size()); }

    /// Directed interval id of the `position`-th interval travelled in `dir`.
    int interval_id(Direction dir, int position) const;
    Direction direction_of(int id) const;
    int position_of(int id) const;

    double min_interval_duration() const;
    double max_interval_duration() const;

    /// Builds the reverse direction from a forward list and validates.
    static MetroNetwork from_forward(std::string name, double sample_rate,
                                     std::vector<StationInterval> forward,
                                     double dwell_min, double dwell_max);
    void validate() const;
};

/// Ground-truth label over a time range. Labels are "mode:<name>" for
/// top-level activity, "interval:<id>" for a ride between stations and
/// "dwell" for a stop between two intervals.
struct TruthRange {
    double start = 0.0;
    double end = 0.0;
    std::string label;

    bool operator==(const TruthRange&) const = default;
};

struct Trace {
    std::string device_id;
    double sample_rate = kDefaultSampleRate;
    std::vector<SensorSample> samples;
    std::optional<std::vector<TruthRange>> ground_truth;

    bool operator==(const Trace&) const = default;

    double duration() const;
    void validate() const;
};

/// Index range [start_index, end_index) into a metro-related sample sequence.
struct Segment {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    std::optional<int> true_interval;

    std::size_t length() const { return end_index - start_index; }
    bool operator==(const Segment&) const = default;
};

// Label helpers.
std::string interval_label(int id);
std::optional<int> parse_interval_label(const std::string& label);
std::string mode_label(const std::string& mode);
bool is_mode_label(const std::string& label);

// Angle normalization into the stored ranges.
Vec3 normalize_orientation(const Vec3& degrees);

Trace load_trace(const std::filesystem::path& path);
void save_trace(const Trace& trace, const std::filesystem::path& path);

MetroNetwork load_network(const std::filesystem::path& path);
void save_network(const MetroNetwork& network, const std::filesystem::path& path);

/// Writes text to a file, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace subtrace
