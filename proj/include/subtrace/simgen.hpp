#pragma once

// Synthetic metro line and phone-sensor trace generator. Everything here is
// a pure function of (config, seed).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "subtrace/model.hpp"

namespace subtrace {

enum class PrimitiveKind { accelerate, cruise, curve, brake };

const char* to_string(PrimitiveKind k);

struct MotionPrimitive {
    PrimitiveKind kind = PrimitiveKind::cruise;
    double duration = 0.0;        // s, a multiple of the sample period
    double forward_accel = 0.0;   // m/s^2 along the direction of travel
    double lateral_accel = 0.0;   // m/s^2, positive to the right

    bool operator==(const MotionPrimitive&) const = default;
};

/// Kinematic fingerprint of one forward interval. The reverse interval is
/// its time reversal (acceleration vectors are unchanged under reversal).
struct TrackProfile {
    int interval_id = 0;
    std::vector<MotionPrimitive> primitives;
    double initial_heading = 0.0;  // radians clockwise from north
    bool distinctive = false;

    double total_duration() const;
    /// Sum of forward_accel * duration; zero when the train ends at rest.
    double net_speed_change() const;
    bool operator==(const TrackProfile&) const = default;
};

// Per-ride timing spread is capped so every traversal stays inside the
// interval bounds produced with the default duration tolerance.
inline constexpr double kMaxDriverVariation = 0.15;

struct NoiseConfig {
    double hand_shake_amp = 0.3;         // m/s^2
    double hand_shake_freq = 10.0 / 3.0; // Hz
    double hand_shake_duty = 0.3;        // fraction of time a burst is active
    double orientation_drift_rate = 1.0; // deg/s random-walk scale
    double sensor_sigma = 0.03;          // m/s^2 white noise per axis
    double defense_noise_amp = 0.0;      // m/s^2
    double vibration_amp = 0.17;         // m/s^2 ride vibration at speed
    double heading_error_deg = 12.0;     // std of the magnetometer heading bias
    double driver_variation = 0.12;      // relative timing/amplitude spread per ride

    static NoiseConfig zero();
    void validate() const;
    bool operator==(const NoiseConfig&) const = default;
};

struct NetworkGenConfig {
    double sample_rate = kDefaultSampleRate;
    double dwell_min = 25.0;
    double dwell_max = 40.0;
    double distinctive_fraction = 0.2;
    double duration_tolerance = 0.16;  // interval bounds around the nominal duration
};

struct GeneratedNetwork {
    MetroNetwork network;
    std::vector<TrackProfile> profiles;  // one per forward interval
};

GeneratedNetwork gen_network(int num_intervals, std::uint64_t seed,
                             const NetworkGenConfig& cfg = {});

struct PhonePose {
    bool flat = false;  // alpha = beta = 0 with fixed heading, no drift
    double flat_heading_deg = 0.0;
};

/// World-frame motion of a trip before it is seen through the phone.
struct TripMotion {
    std::vector<Vec3> world_acc;  // ENU, gravity excluded
    std::vector<TruthRange> truth;
};

TripMotion simulate_trip_motion(const MetroNetwork& network,
                                const std::vector<TrackProfile>& profiles, int start_interval,
                                int length, const NoiseConfig& noise, std::uint64_t seed);

Trace gen_trip(const MetroNetwork& network, const std::vector<TrackProfile>& profiles,
               int start_interval, int length, const NoiseConfig& noise, std::uint64_t seed,
               const PhonePose& pose = {});

enum class OtherMode { walk, bus, taxi, still };

const char* to_string(OtherMode m);
OtherMode parse_other_mode(const std::string& s);

Trace gen_other_mode(OtherMode mode, double duration, const NoiseConfig& noise,
                     std::uint64_t seed, double sample_rate = kDefaultSampleRate,
                     const PhonePose& pose = {});

struct ScheduleItem {
    bool is_trip = false;
    OtherMode mode = OtherMode::still;
    double duration = 0.0;  // s, for non-trip items
    int start_interval = 0;
    int length = 1;

    static ScheduleItem other(OtherMode m, double seconds) { return {false, m, seconds, 0, 1}; }
    static ScheduleItem trip(int start, int len) { return {true, OtherMode::still, 0.0, start, len}; }
};

Trace gen_mixed_day(const MetroNetwork& network, const std::vector<TrackProfile>& profiles,
                    const std::vector<ScheduleItem>& schedule, const NoiseConfig& noise,
                    std::uint64_t seed);

Trace apply_defense_noise(const Trace& trace, double amp, std::uint64_t seed);

void save_profiles(const std::vector<TrackProfile>& profiles, const std::filesystem::path& path);
std::vector<TrackProfile> load_profiles(const std::filesystem::path& path);

}  // namespace subtrace
