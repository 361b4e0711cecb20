#include "subtrace/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "subtrace/coord.hpp"
#include "subtrace/rng.hpp"

namespace subtrace {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

long to_samples(double seconds, double rate) { return std::lround(seconds * rate); }

}  // namespace

const char* to_string(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::accelerate: return "accelerate";
        case PrimitiveKind::cruise: return "cruise";
        case PrimitiveKind::curve: return "curve";
        case PrimitiveKind::brake: return "brake";
    }
    return "cruise";
}

namespace {

PrimitiveKind parse_kind(const std::string& s) {
    if (s == "accelerate") return PrimitiveKind::accelerate;
    if (s == "curve") return PrimitiveKind::curve;
    if (s == "brake") return PrimitiveKind::brake;
    if (s == "cruise") return PrimitiveKind::cruise;
    throw FormatError("unknown motion primitive kind: " + s);
}

}  // namespace

double TrackProfile::total_duration() const {
    double d = 0.0;
    for (const auto& p : primitives) d += p.duration;
    return d;
}

double TrackProfile::net_speed_change() const {
    double dv = 0.0;
    for (const auto& p : primitives) dv += p.forward_accel * p.duration;
    return dv;
}

NoiseConfig NoiseConfig::zero() {
    NoiseConfig n;
    n.hand_shake_amp = 0.0;
    n.orientation_drift_rate = 0.0;
    n.sensor_sigma = 0.0;
    n.defense_noise_amp = 0.0;
    n.vibration_amp = 0.0;
    n.heading_error_deg = 0.0;
    n.driver_variation = 0.0;
    return n;
}

void NoiseConfig::validate() const {
    const double values[] = {hand_shake_amp,  hand_shake_freq,   hand_shake_duty,
                             orientation_drift_rate, sensor_sigma, defense_noise_amp,
                             vibration_amp,   heading_error_deg, driver_variation};
    for (double v : values)
        if (!(v >= 0.0)) throw ValidationError("noise parameters must be non-negative");
    if (hand_shake_duty >= 1.0) throw ValidationError("hand_shake_duty must be below 1");
}

// ---------------------------------------------------------------------------
// Network generation

namespace {

struct CurveSpec {
    double start = 0.0;  // s from the start of the cruise phase
    double duration = 0.0;
    double lateral = 0.0;
};

TrackProfile make_profile(Rng& rng, int id, double rate, bool distinctive) {
    const double dt = 1.0 / rate;
    auto quantize = [&](double s) { return std::max(1L, to_samples(s, rate)) * dt; };

    const double v_max = distinctive ? uniform(rng, 14.0, 22.0) : uniform(rng, 15.0, 19.0);
    const double d_acc = quantize(v_max / uniform(rng, 0.7, 1.1));
    const double d_brk = quantize(v_max / uniform(rng, 0.7, 1.1));
    const double total = distinctive ? uniform(rng, 120.0, 160.0) : uniform(rng, 85.0, 115.0);
    const double cruise = quantize(std::max(25.0, total - d_acc - d_brk));

    const int curves = distinctive ? 2 : 1 + (uniform01(rng) < 0.5 ? 1 : 0);
    std::vector<CurveSpec> specs;
    const double slot = cruise / curves;
    for (int c = 0; c < curves; ++c) {
        CurveSpec s;
        s.duration = quantize(distinctive ? uniform(rng, 10.0, 18.0) : uniform(rng, 5.0, 12.0));
        s.duration = std::min(s.duration, quantize(slot * 0.8));
        const double mag = distinctive ? uniform(rng, 0.6, 0.9) : uniform(rng, 0.10, 0.25);
        s.lateral = uniform01(rng) < 0.5 ? -mag : mag;
        const double room = slot - s.duration;
        s.start = c * slot + quantize(std::max(dt, uniform(rng, 0.1, 0.9) * room));
        specs.push_back(s);
    }

    TrackProfile p;
    p.interval_id = id;
    p.distinctive = distinctive;
    p.primitives.push_back({PrimitiveKind::accelerate, d_acc, v_max / d_acc, 0.0});
    double cursor = 0.0;
    for (const auto& s : specs) {
        const double gap = quantize(s.start - cursor);
        if (s.start - cursor > 0.5 * dt) p.primitives.push_back({PrimitiveKind::cruise, gap, 0.0, 0.0});
        p.primitives.push_back({PrimitiveKind::curve, s.duration, 0.0, s.lateral});
        cursor += (s.start - cursor > 0.5 * dt ? gap : 0.0) + s.duration;
    }
    if (cruise - cursor > 0.5 * dt)
        p.primitives.push_back({PrimitiveKind::cruise, quantize(cruise - cursor), 0.0, 0.0});
    // Brake magnitude chosen so the train ends at rest.
    p.primitives.push_back({PrimitiveKind::brake, d_brk, -v_max / d_brk, 0.0});
    return p;
}

double max_lateral(const TrackProfile& p) {
    double m = 0.0;
    for (const auto& q : p.primitives) m = std::max(m, std::abs(q.lateral_accel));
    return m;
}

double first_curve_offset(const TrackProfile& p) {
    double t = 0.0;
    for (const auto& q : p.primitives) {
        if (q.kind == PrimitiveKind::curve) return t;
        t += q.duration;
    }
    return t;
}

bool distinct(const TrackProfile& a, const TrackProfile& b) {
    return std::abs(a.total_duration() - b.total_duration()) >= 2.0 ||
           std::abs(max_lateral(a) - max_lateral(b)) >= 0.05 ||
           std::abs(first_curve_offset(a) - first_curve_offset(b)) >= 5.0;
}

// Samples one forward traversal: world-frame acceleration plus speed.
struct SampledInterval {
    std::vector<Vec3> acc;
    std::vector<double> speed;
};

SampledInterval sample_profile(const TrackProfile& profile, double rate, double time_scale,
                               double lateral_scale, double forward_scale) {
    const double dt = 1.0 / rate;
    struct Piece {
        long n;
        double fwd;
        double lat;
    };
    std::vector<Piece> pieces;
    double impulse = 0.0;
    for (std::size_t i = 0; i < profile.primitives.size(); ++i) {
        const auto& q = profile.primitives[i];
        Piece piece{std::max(1L, to_samples(q.duration * time_scale, rate)), 0.0, 0.0};
        piece.lat = q.lateral_accel * lateral_scale;
        if (q.kind == PrimitiveKind::accelerate) {
            // Keep the cruise speed, stretch the ramp.
            piece.fwd = q.forward_accel * q.duration * forward_scale / (piece.n * dt);
        } else {
            piece.fwd = q.forward_accel;
        }
        if (q.kind != PrimitiveKind::brake) impulse += piece.fwd * piece.n * dt;
        pieces.push_back(piece);
    }
    for (auto& piece : pieces)
        if (&piece == &pieces.back()) piece.fwd = -impulse / (piece.n * dt);

    SampledInterval out;
    double heading = profile.initial_heading;
    double v = 0.0;
    for (const auto& piece : pieces) {
        for (long k = 0; k < piece.n; ++k) {
            const double s = std::sin(heading), c = std::cos(heading);
            out.acc.push_back({piece.fwd * s + piece.lat * c, piece.fwd * c - piece.lat * s, 0.0});
            out.speed.push_back(v);
            v = std::max(0.0, v + piece.fwd * dt);
            if (v > 0.5) heading += piece.lat / v * dt;
        }
    }
    return out;
}

}  // namespace

GeneratedNetwork gen_network(int num_intervals, std::uint64_t seed, const NetworkGenConfig& cfg) {
    if (num_intervals < 2) throw ValidationError("gen_network needs at least 2 intervals");
    Rng rng = make_rng(derive_seed(seed, "network"));

    const int n_distinct =
        std::max(1, static_cast<int>(std::lround(cfg.distinctive_fraction * num_intervals)));
    std::vector<int> order(num_intervals);
    for (int i = 0; i < num_intervals; ++i) order[i] = i;
    for (int i = num_intervals - 1; i > 0; --i)
        std::swap(order[i], order[uniform_index(rng, static_cast<std::size_t>(i) + 1)]);
    std::vector<bool> is_distinct(num_intervals, false);
    for (int i = 0; i < n_distinct; ++i) is_distinct[order[i]] = true;

    GeneratedNetwork out;
    std::vector<StationInterval> forward;
    double heading = uniform(rng, 0.0, 2.0 * kPi);
    for (int k = 0; k < num_intervals; ++k) {
        TrackProfile p;
        for (int attempt = 0;; ++attempt) {
            p = make_profile(rng, k, cfg.sample_rate, is_distinct[k]);
            bool ok = true;
            for (const auto& prev : out.profiles) ok = ok && distinct(p, prev);
            if (ok || attempt > 200) break;
        }
        p.initial_heading = heading;
        // Heading at the far station feeds the next interval.
        const auto sampled = sample_profile(p, cfg.sample_rate, 1.0, 1.0, 1.0);
        double h = p.initial_heading;
        for (std::size_t i = 0; i < sampled.acc.size(); ++i) {
            const double v = sampled.speed[i];
            const double lat = sampled.acc[i][0] * std::cos(h) - sampled.acc[i][1] * std::sin(h);
            if (v > 0.5) h += lat / v / cfg.sample_rate;
        }
        heading = h + uniform(rng, -0.3, 0.3);
        out.profiles.push_back(p);

        const double d = p.total_duration();
        StationInterval iv;
        iv.id = k;
        iv.from_station = "S" + std::to_string(k);
        iv.to_station = "S" + std::to_string(k + 1);
        iv.min_duration = d * (1.0 - cfg.duration_tolerance);
        iv.max_duration = d * (1.0 + cfg.duration_tolerance);
        forward.push_back(iv);
    }
    out.network = MetroNetwork::from_forward("synthetic-line", cfg.sample_rate, std::move(forward),
                                             cfg.dwell_min, cfg.dwell_max);
    return out;
}

// ---------------------------------------------------------------------------
// Trips

TripMotion simulate_trip_motion(const MetroNetwork& network,
                                const std::vector<TrackProfile>& profiles, int start_interval,
                                int length, const NoiseConfig& noise, std::uint64_t seed) {
    noise.validate();
    const int line = network.line_length();
    if (length < 1) throw ValidationError("trip length must be at least 1");
    if (start_interval < 0 || start_interval >= network.interval_count())
        throw ValidationError("unknown start interval " + std::to_string(start_interval));
    if (static_cast<int>(profiles.size()) != line)
        throw ValidationError("profile count does not match the network");
    const Direction dir = network.direction_of(start_interval);
    const int pos0 = network.position_of(start_interval);
    if (pos0 + length > line) throw ValidationError("trip runs off the end of the line");

    const double rate = network.sample_rate;
    const double dt = 1.0 / rate;
    Rng jitter = make_rng(derive_seed(seed, "driver"));
    Rng dwell_rng = make_rng(derive_seed(seed, "dwell"));
    Rng vib_rng = make_rng(derive_seed(seed, "vibration"));

    TripMotion out;
    std::vector<double> speed;
    const double var = std::min(noise.driver_variation, kMaxDriverVariation);
    // Boarding and alighting: half a dwell at the platform on either end.
    auto platform = [&]() {
        const long n = to_samples(0.5 * uniform(dwell_rng, network.dwell_min, network.dwell_max), rate);
        out.world_acc.insert(out.world_acc.end(), n, Vec3{0.0, 0.0, 0.0});
        speed.insert(speed.end(), n, 0.0);
    };
    platform();
    for (int j = 0; j < length; ++j) {
        const int pos = pos0 + j;
        const int physical = dir == Direction::forward ? pos : line - 1 - pos;
        const double time_scale = 1.0 + uniform(jitter, -var, var);
        const double lat_scale = 1.0 + uniform(jitter, -var, var);
        const double fwd_scale = 1.0 + uniform(jitter, -var, var);
        auto s = sample_profile(profiles[physical], rate, time_scale, lat_scale, fwd_scale);
        if (dir == Direction::reverse) {
            std::reverse(s.acc.begin(), s.acc.end());
            std::reverse(s.speed.begin(), s.speed.end());
        }
        const double t0 = out.world_acc.size() * dt;
        out.world_acc.insert(out.world_acc.end(), s.acc.begin(), s.acc.end());
        speed.insert(speed.end(), s.speed.begin(), s.speed.end());
        const double t1 = out.world_acc.size() * dt;
        out.truth.push_back({t0, t1, interval_label(network.interval_id(dir, pos))});
        if (j + 1 < length) {
            const long n = to_samples(uniform(dwell_rng, network.dwell_min, network.dwell_max), rate);
            out.world_acc.insert(out.world_acc.end(), n, Vec3{0.0, 0.0, 0.0});
            speed.insert(speed.end(), n, 0.0);
            out.truth.push_back({t1, out.world_acc.size() * dt, "dwell"});
        }
    }
    platform();
    out.truth.insert(out.truth.begin(), {0.0, out.world_acc.size() * dt, mode_label("metro")});

    if (noise.vibration_amp > 0.0) {
        constexpr double rho = 0.7;
        const double innov = std::sqrt(1.0 - rho * rho);
        Vec3 state{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < out.world_acc.size(); ++i) {
            const double level = noise.vibration_amp * std::min(1.0, speed[i] / 8.0);
            for (int a = 0; a < 3; ++a) {
                state[a] = rho * state[a] + innov * gaussian(vib_rng);
                out.world_acc[i][a] += level * state[a] * (a == 2 ? 0.7 : 1.0);
            }
        }
    }
    return out;
}

namespace {

// Renders world-frame motion through a hand-held phone.
std::vector<SensorSample> phone_view(const std::vector<Vec3>& world, double rate,
                                     const NoiseConfig& noise, std::uint64_t seed,
                                     const PhonePose& pose) {
    Rng pose_rng = make_rng(derive_seed(seed, "pose"));
    Rng shake_rng = make_rng(derive_seed(seed, "handshake"));
    Rng sensor_rng = make_rng(derive_seed(seed, "sensor"));
    Rng bias_rng = make_rng(derive_seed(seed, "heading-bias"));

    const double dt = 1.0 / rate;
    double alpha = pose.flat ? 0.0 : uniform(pose_rng, 15.0, 55.0);
    double roll = pose.flat ? 0.0 : uniform(pose_rng, -15.0, 15.0);
    double yaw = pose.flat ? pose.flat_heading_deg : uniform(pose_rng, 0.0, 360.0);
    const double bias = noise.heading_error_deg * gaussian(bias_rng);
    const double drift = pose.flat ? 0.0 : noise.orientation_drift_rate * std::sqrt(dt);

    const bool shaking = noise.hand_shake_amp > 0.0 && noise.hand_shake_duty > 0.0;
    const double mean_burst = 4.0;
    const double mean_gap =
        shaking ? mean_burst * (1.0 - noise.hand_shake_duty) / noise.hand_shake_duty : 0.0;
    long burst_left = 0;
    Vec3 burst_dir{};
    double burst_phase = 0.0;

    std::vector<SensorSample> out;
    out.reserve(world.size());
    for (std::size_t i = 0; i < world.size(); ++i) {
        if (drift > 0.0) {
            alpha = std::clamp(alpha + drift * gaussian(pose_rng), 5.0, 80.0);
            roll = std::clamp(roll + drift * gaussian(pose_rng), -40.0, 40.0);
            yaw += drift * gaussian(pose_rng);
        }
        const double a_rad = alpha * kPi / 180.0, r_rad = roll * kPi / 180.0;
        const double beta = std::asin(-std::cos(a_rad) * std::sin(r_rad)) * 180.0 / kPi;
        const Vec3 truth_deg = normalize_orientation({alpha, beta, yaw});
        const Rotation rot = rotation_from(OrientationAngles::from_degrees(truth_deg));

        const Vec3 specific{world[i][0], world[i][1], world[i][2] + kGravity};
        Vec3 acc = rotate_inverse(rot, specific);

        if (shaking) {
            if (burst_left == 0 && uniform01(shake_rng) < dt / mean_gap) {
                burst_left = to_samples(uniform(shake_rng, 2.0, 6.0), rate);
                const double th = uniform(shake_rng, 0.0, 2.0 * kPi);
                const double z = uniform(shake_rng, -1.0, 1.0);
                const double rxy = std::sqrt(1.0 - z * z);
                burst_dir = {rxy * std::cos(th), rxy * std::sin(th), z};
                burst_phase = uniform(shake_rng, 0.0, 2.0 * kPi);
            }
            if (burst_left > 0) {
                const double w = noise.hand_shake_amp *
                                 std::sin(2.0 * kPi * noise.hand_shake_freq * i * dt + burst_phase);
                for (int a = 0; a < 3; ++a) acc[a] += w * burst_dir[a];
                --burst_left;
            }
        }
        if (noise.sensor_sigma > 0.0)
            for (int a = 0; a < 3; ++a) acc[a] += noise.sensor_sigma * gaussian(sensor_rng);

        SensorSample s;
        s.t = static_cast<double>(i) / rate;
        s.acc = acc;
        s.orient = normalize_orientation({truth_deg[0], truth_deg[1], truth_deg[2] + bias});
        out.push_back(s);
    }
    return out;
}

}  // namespace

Trace gen_trip(const MetroNetwork& network, const std::vector<TrackProfile>& profiles,
               int start_interval, int length, const NoiseConfig& noise, std::uint64_t seed,
               const PhonePose& pose) {
    auto motion = simulate_trip_motion(network, profiles, start_interval, length, noise, seed);
    Trace trace;
    trace.device_id = "sim-trip";
    trace.sample_rate = network.sample_rate;
    trace.samples = phone_view(motion.world_acc, network.sample_rate, noise, seed, pose);
    trace.ground_truth = std::move(motion.truth);
    return trace;
}

// ---------------------------------------------------------------------------
// Other transport modes

const char* to_string(OtherMode m) {
    switch (m) {
        case OtherMode::walk: return "walk";
        case OtherMode::bus: return "bus";
        case OtherMode::taxi: return "taxi";
        case OtherMode::still: return "static";
    }
    return "static";
}

OtherMode parse_other_mode(const std::string& s) {
    if (s == "walk") return OtherMode::walk;
    if (s == "bus") return OtherMode::bus;
    if (s == "taxi") return OtherMode::taxi;
    if (s == "static" || s == "still") return OtherMode::still;
    throw ValidationError("unknown mode: " + s);
}

namespace {

std::vector<Vec3> walk_motion(long n, double rate, Rng& rng) {
    const double fs = uniform(rng, 1.8, 2.2);
    const double af = uniform(rng, 1.8, 2.4), al = uniform(rng, 0.6, 0.9), av = uniform(rng, 2.0, 3.0);
    const double p1 = uniform(rng, 0, 2 * kPi), p2 = uniform(rng, 0, 2 * kPi), p3 = uniform(rng, 0, 2 * kPi);
    double heading = uniform(rng, 0.0, 2 * kPi);
    std::vector<Vec3> out(n);
    for (long i = 0; i < n; ++i) {
        const double t = i / rate;
        heading += 0.02 * gaussian(rng);
        const double mod = 1.0 + 0.1 * gaussian(rng);
        const double f = mod * af * std::sin(2 * kPi * fs * t + p1);
        const double l = mod * al * std::sin(kPi * fs * t + p2);
        const double s = std::sin(heading), c = std::cos(heading);
        out[i] = {f * s + l * c, f * c - l * s, mod * av * std::sin(2 * kPi * fs * t + p3)};
    }
    return out;
}

struct RoadStyle {
    double rho;
    double sigma;
    double gap_lo, gap_hi;
    double accel_lo, accel_hi;
    double turn_lo, turn_hi;
};

std::vector<Vec3> road_motion(long n, double rate, Rng& rng, const RoadStyle& st) {
    const double innov = std::sqrt(1.0 - st.rho * st.rho);
    double heading = uniform(rng, 0.0, 2 * kPi);
    double f_state = 0.0, l_state = 0.0, v_state = 0.0;
    long until_event = to_samples(uniform(rng, st.gap_lo, st.gap_hi), rate);
    long event_left = 0;
    double ev_f = 0.0, ev_l = 0.0;
    std::vector<Vec3> out(n);
    for (long i = 0; i < n; ++i) {
        if (event_left == 0 && --until_event <= 0) {
            event_left = to_samples(uniform(rng, 3.0, 8.0), rate);
            until_event = to_samples(uniform(rng, st.gap_lo, st.gap_hi), rate);
            const double pick = uniform01(rng);
            ev_f = ev_l = 0.0;
            if (pick < 0.35) ev_f = uniform(rng, st.accel_lo, st.accel_hi);
            else if (pick < 0.7) ev_f = -uniform(rng, st.accel_lo, st.accel_hi);
            else ev_l = (uniform01(rng) < 0.5 ? -1 : 1) * uniform(rng, st.turn_lo, st.turn_hi);
        }
        double f = 0.0, l = 0.0;
        if (event_left > 0) {
            f = ev_f;
            l = ev_l;
            if (ev_l != 0.0) heading += ev_l / 8.0 / rate;
            --event_left;
        }
        f_state = st.rho * f_state + innov * gaussian(rng);
        l_state = st.rho * l_state + innov * gaussian(rng);
        v_state = 0.5 * v_state + 0.87 * gaussian(rng);
        f += st.sigma * f_state;
        l += st.sigma * l_state;
        const double s = std::sin(heading), c = std::cos(heading);
        out[i] = {f * s + l * c, f * c - l * s, st.sigma * v_state};
    }
    return out;
}

}  // namespace

Trace gen_other_mode(OtherMode mode, double duration, const NoiseConfig& noise, std::uint64_t seed,
                     double sample_rate, const PhonePose& pose) {
    if (!(duration > 0.0)) throw ValidationError("duration must be positive");
    noise.validate();
    const long n = std::max(1L, to_samples(duration, sample_rate));
    Rng rng = make_rng(derive_seed(seed, "motion"));
    std::vector<Vec3> world;
    switch (mode) {
        case OtherMode::walk: world = walk_motion(n, sample_rate, rng); break;
        case OtherMode::bus:
            world = road_motion(n, sample_rate, rng, {0.85, 0.62, 10, 40, 0.8, 1.5, 1.0, 2.0});
            break;
        case OtherMode::taxi:
            world = road_motion(n, sample_rate, rng, {0.7, 0.65, 5, 25, 1.0, 2.2, 1.5, 3.0});
            break;
        case OtherMode::still: world.assign(n, Vec3{0.0, 0.0, 0.0}); break;
    }
    Trace trace;
    trace.device_id = std::string("sim-") + to_string(mode);
    trace.sample_rate = sample_rate;
    trace.samples = phone_view(world, sample_rate, noise, seed, pose);
    trace.ground_truth = std::vector<TruthRange>{
        {0.0, static_cast<double>(n) / sample_rate, mode_label(to_string(mode))}};
    return trace;
}

Trace gen_mixed_day(const MetroNetwork& network, const std::vector<TrackProfile>& profiles,
                    const std::vector<ScheduleItem>& schedule, const NoiseConfig& noise,
                    std::uint64_t seed) {
    if (schedule.empty()) throw ValidationError("schedule is empty");
    const double rate = network.sample_rate;
    Trace day;
    day.device_id = "sim-day";
    day.sample_rate = rate;
    day.ground_truth = std::vector<TruthRange>{};
    std::size_t offset = 0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& item = schedule[k];
        const std::uint64_t s = derive_seed(seed, k);
        Trace part = item.is_trip
                         ? gen_trip(network, profiles, item.start_interval, item.length, noise, s)
                         : gen_other_mode(item.mode, item.duration, noise, s, rate);
        const double t_off = static_cast<double>(offset) / rate;
        for (std::size_t i = 0; i < part.samples.size(); ++i) {
            SensorSample smp = part.samples[i];
            smp.t = static_cast<double>(offset + i) / rate;
            day.samples.push_back(smp);
        }
        for (auto r : *part.ground_truth) {
            r.start += t_off;
            r.end += t_off;
            day.ground_truth->push_back(r);
        }
        offset += part.samples.size();
    }
    return day;
}

Trace apply_defense_noise(const Trace& trace, double amp, std::uint64_t seed) {
    if (amp < 0.0) throw ValidationError("defense noise amplitude must be non-negative");
    Trace out = trace;
    if (amp == 0.0) return out;
    Rng rng = make_rng(derive_seed(seed, "defense"));
    for (auto& s : out.samples)
        for (auto& a : s.acc) a += amp * gaussian(rng);
    return out;
}

// ---------------------------------------------------------------------------
// Profile files

void save_profiles(const std::vector<TrackProfile>& profiles, const std::filesystem::path& path) {
    json arr = json::array();
    for (const auto& p : profiles) {
        json prims = json::array();
        for (const auto& q : p.primitives)
            prims.push_back({{"kind", to_string(q.kind)},
                             {"duration", q.duration},
                             {"forward_accel", q.forward_accel},
                             {"lateral_accel", q.lateral_accel}});
        arr.push_back({{"interval_id", p.interval_id},
                       {"initial_heading", p.initial_heading},
                       {"distinctive", p.distinctive},
                       {"primitives", prims}});
    }
    write_text_file(path, json{{"profiles", arr}}.dump(2) + "\n");
}

std::vector<TrackProfile> load_profiles(const std::filesystem::path& path) {
    std::vector<TrackProfile> out;
    try {
        const json j = json::parse(read_text_file(path));
        for (const auto& jp : j.at("profiles")) {
            TrackProfile p;
            p.interval_id = jp.at("interval_id").get<int>();
            p.initial_heading = jp.at("initial_heading").get<double>();
            p.distinctive = jp.at("distinctive").get<bool>();
            for (const auto& q : jp.at("primitives"))
                p.primitives.push_back({parse_kind(q.at("kind").get<std::string>()),
                                        q.at("duration").get<double>(),
                                        q.at("forward_accel").get<double>(),
                                        q.at("lateral_accel").get<double>()});
            out.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad profile file: ") + e.what());
    }
    return out;
}

}  // namespace subtrace
