#include "subtrace/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace subtrace {

using nlohmann::json;

const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "reverse"; }

int MetroNetwork::interval_id(Direction dir, int position) const {
    return dir == Direction::forward ? position : line_length() + position;
}

Direction MetroNetwork::direction_of(int id) const {
    return id < line_length() ? Direction::forward : Direction::reverse;
}

int MetroNetwork::position_of(int id) const { return id < line_length() ? id : id - line_length(); }

double MetroNetwork::min_interval_duration() const {
    double best = intervals.front().min_duration;
    for (const auto& iv : intervals) best = std::min(best, iv.min_duration);
    return best;
}

double MetroNetwork::max_interval_duration() const {
    double best = intervals.front().max_duration;
    for (const auto& iv : intervals) best = std::max(best, iv.max_duration);
    return best;
}

MetroNetwork MetroNetwork::from_forward(std::string name, double sample_rate,
                                        std::vector<StationInterval> forward, double dwell_min,
                                        double dwell_max) {
    MetroNetwork net;
    net.name = std::move(name);
    net.sample_rate = sample_rate;
    net.dwell_min = dwell_min;
    net.dwell_max = dwell_max;
    const int n = static_cast<int>(forward.size());
    for (int i = 0; i < n; ++i) {
        forward[i].id = i;
        forward[i].direction = Direction::forward;
    }
    net.intervals = forward;
    // Reverse travel order: last forward interval first, stations swapped.
    for (int k = n - 1; k >= 0; --k) {
        StationInterval rev = forward[k];
        rev.id = n + (n - 1 - k);
        std::swap(rev.from_station, rev.to_station);
        rev.direction = Direction::reverse;
        net.intervals.push_back(rev);
    }
    net.validate();
    return net;
}

void MetroNetwork::validate() const {
    if (intervals.empty()) throw ValidationError("network has no intervals");
    if (intervals.size() % 2 != 0)
        throw ValidationError("forward and reverse interval lists differ in length");
    if (!(sample_rate > 0.0)) throw ValidationError("sample_rate must be positive");
    if (dwell_min < 20.0) throw ValidationError("dwell_min must be at least 20 s");
    if (dwell_max < dwell_min) throw ValidationError("dwell_max < dwell_min");
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        if (iv.id != static_cast<int>(i))
            throw ValidationError("interval ids must be consecutive, got " + std::to_string(iv.id) +
                                  " at position " + std::to_string(i));
        if (!(iv.min_duration > 0.0) || iv.min_duration > iv.max_duration)
            throw ValidationError("interval " + std::to_string(iv.id) +
                                  " needs 0 < min_duration <= max_duration");
        if (iv.direction != direction_of(iv.id))
            throw ValidationError("interval " + std::to_string(iv.id) + " has the wrong direction");
    }
}

double Trace::duration() const {
    if (samples.empty()) return 0.0;
    return samples.back().t - samples.front().t + 1.0 / sample_rate;
}

void Trace::validate() const {
    if (!(sample_rate > 0.0)) throw ValidationError("sample_rate must be positive");
    const double dt = 1.0 / sample_rate;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = samples[i].t;
        if (!std::isfinite(t) || t < 0.0)
            throw ValidationError("sample " + std::to_string(i) + " has a negative timestamp");
        if (i > 0) {
            const double gap = t - samples[i - 1].t;
            if (!(gap > 0.0))
                throw ValidationError("timestamps not strictly increasing at sample " +
                                      std::to_string(i));
            if (std::abs(gap - dt) > 0.01 * dt)
                throw ValidationError("sample spacing off by more than 1% at sample " +
                                      std::to_string(i));
        }
    }
}

std::string interval_label(int id) { return "interval:" + std::to_string(id); }

std::optional<int> parse_interval_label(const std::string& label) {
    static const std::string prefix = "interval:";
    if (label.rfind(prefix, 0) != 0) return std::nullopt;
    try {
        return std::stoi(label.substr(prefix.size()));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string mode_label(const std::string& mode) { return "mode:" + mode; }

bool is_mode_label(const std::string& label) { return label.rfind("mode:", 0) == 0; }

Vec3 normalize_orientation(const Vec3& d) {
    Vec3 out = d;
    out[0] = std::clamp(d[0], -90.0, 90.0);
    double beta = std::fmod(d[1], 360.0);
    if (beta > 180.0) beta -= 360.0;
    if (beta < -180.0) beta += 360.0;
    out[1] = beta;
    double gamma = std::fmod(d[2], 360.0);
    if (gamma < 0.0) gamma += 360.0;
    if (gamma >= 360.0) gamma = 0.0;
    out[2] = gamma;
    return out;
}

namespace {

Vec3 read_vec3(const json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing \"") + key + "\"", line);
    if (!it->is_array() || it->size() != 3)
        throw ParseError(std::string("\"") + key + "\" must be an array of 3 numbers", line);
    Vec3 v{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(*it)[i].is_number())
            throw ParseError(std::string("\"") + key + "\" must be an array of 3 numbers", line);
        v[i] = (*it)[i].get<double>();
    }
    return v;
}

}  // namespace

Trace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file " + path.string());

    Trace trace;
    std::string text;
    std::size_t line_no = 0;
    bool seen_truth = false;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
        if (seen_truth) throw ParseError("data after the truth trailer", line_no);

        if (auto meta = j.find("meta"); meta != j.end()) {
            if (!trace.samples.empty()) throw ParseError("meta header after data lines", line_no);
            trace.device_id = meta->value("device_id", "");
            trace.sample_rate = meta->value("sample_rate", kDefaultSampleRate);
            continue;
        }
        if (auto truth = j.find("truth"); truth != j.end()) {
            if (!truth->is_array()) throw ParseError("\"truth\" must be an array", line_no);
            std::vector<TruthRange> ranges;
            for (const auto& r : *truth) {
                if (!r.contains("start") || !r.contains("end") || !r.contains("label"))
                    throw ParseError("truth range needs start, end and label", line_no);
                ranges.push_back({r["start"].get<double>(), r["end"].get<double>(),
                                  r["label"].get<std::string>()});
            }
            trace.ground_truth = std::move(ranges);
            seen_truth = true;
            continue;
        }
        auto t = j.find("t");
        if (t == j.end() || !t->is_number()) throw ParseError("missing numeric \"t\"", line_no);
        SensorSample s;
        s.t = t->get<double>();
        s.acc = read_vec3(j, "acc", line_no);
        s.orient = normalize_orientation(read_vec3(j, "orient", line_no));
        trace.samples.push_back(s);
    }
    trace.validate();
    return trace;
}

void save_trace(const Trace& trace, const std::filesystem::path& path) {
    std::ostringstream out;
    out << json{{"meta", {{"device_id", trace.device_id}, {"sample_rate", trace.sample_rate}}}}.dump()
        << '\n';
    for (const auto& s : trace.samples) {
        json j;
        j["t"] = s.t;
        j["acc"] = s.acc;
        j["orient"] = s.orient;
        out << j.dump() << '\n';
    }
    if (trace.ground_truth) {
        json ranges = json::array();
        for (const auto& r : *trace.ground_truth)
            ranges.push_back({{"start", r.start}, {"end", r.end}, {"label", r.label}});
        out << json{{"truth", ranges}}.dump() << '\n';
    }
    write_text_file(path, out.str());
}

MetroNetwork load_network(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid network JSON: ") + e.what(), 1);
    }
    try {
        std::vector<StationInterval> forward;
        for (const auto& iv : j.at("intervals")) {
            StationInterval s;
            s.id = iv.at("id").get<int>();
            s.from_station = iv.at("from").get<std::string>();
            s.to_station = iv.at("to").get<std::string>();
            s.min_duration = iv.at("min_duration").get<double>();
            s.max_duration = iv.at("max_duration").get<double>();
            forward.push_back(s);
        }
        for (std::size_t i = 0; i < forward.size(); ++i)
            if (forward[i].id != static_cast<int>(i))
                throw ValidationError("forward interval ids must be 0..n-1 in order");
        const auto& dwell = j.at("dwell");
        return MetroNetwork::from_forward(j.at("name").get<std::string>(),
                                          j.value("sample_rate", kDefaultSampleRate),
                                          std::move(forward), dwell.at(0).get<double>(),
                                          dwell.at(1).get<double>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad network document: ") + e.what(), 1);
    }
}

void save_network(const MetroNetwork& network, const std::filesystem::path& path) {
    json intervals = json::array();
    for (int i = 0; i < network.line_length(); ++i) {
        const auto& iv = network.intervals[i];
        intervals.push_back({{"id", iv.id},
                             {"from", iv.from_station},
                             {"to", iv.to_station},
                             {"min_duration", iv.min_duration},
                             {"max_duration", iv.max_duration}});
    }
    json j{{"name", network.name},
           {"sample_rate", network.sample_rate},
           {"dwell", {network.dwell_min, network.dwell_max}},
           {"intervals", intervals}};
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace subtrace
