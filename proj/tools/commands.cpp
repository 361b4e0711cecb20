#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "subtrace/coord.hpp"
#include "subtrace/log.hpp"
#include "subtrace/rng.hpp"

namespace subtrace {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NoiseConfig, hand_shake_amp, hand_shake_freq, hand_shake_duty,
                                                orientation_drift_rate, sensor_sigma, defense_noise_amp,
                                                vibration_amp, heading_error_deg, driver_variation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NetworkGenConfig, sample_rate, dwell_min, dwell_max,
                                                distinctive_fraction, duration_tolerance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ForestParams, trees, max_depth, min_leaf, feature_frac, bootstrap)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EnsembleParams, boost_rounds, forest)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SemisupParams, hit_threshold, margin, enough, late_weight,
                                                max_rounds, negative_sample, ensemble)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BenchmarkConfig, seed, line_length, trips, trip_length, lengths,
                                                noise, network, ensemble, semisup, seed_extra, defense_factor,
                                                mixed_days, mixed_train_days, robustness, augment_reverse)

namespace cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kOtherDuration = 300.0;  // seconds per standalone non-metro trace

void check_keys(const json& given, const json& known, const std::string& where) {
    if (!given.is_object()) return;
    for (const auto& [key, value] : given.items()) {
        if (!known.contains(key)) throw UsageError("unknown config key '" + where + key + "'");
        check_keys(value, known.at(key), where + key + ".");
    }
}

BenchmarkConfig resolve_config(const CommonOptions& o, const std::optional<fs::path>& corpus) {
    BenchmarkConfig c;
    if (o.config) c = load_config(*o.config);
    else if (corpus && fs::exists(*corpus / "config.json")) c = load_config(*corpus / "config.json");
    if (o.seed) c.seed = *o.seed;
    return c;
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& prefix) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind(prefix, 0) == 0 && e.path().extension() == ".jsonl")
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Trace> load_traces(const std::vector<fs::path>& paths) {
    std::vector<Trace> out;
    for (const auto& p : paths) out.push_back(load_trace(p));
    return out;
}

std::string numbered(const std::string& prefix, std::size_t k, int width = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, k);
    return prefix + buf + ".jsonl";
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json hypothesis_json(const TraceHypothesis& h, const MetroNetwork& net) {
    const int line = net.line_length();
    json ids = json::array();
    for (int j = 0; j < h.length; ++j) ids.push_back(h.interval_at(j, line));
    const auto& first = net.intervals.at(static_cast<std::size_t>(h.interval_at(0, line)));
    const auto& last = net.intervals.at(static_cast<std::size_t>(h.interval_at(h.length - 1, line)));
    return {{"direction", to_string(h.direction)},
            {"start_interval", h.start_interval(line)},
            {"length", h.length},
            {"intervals", ids},
            {"from_station", first.from_station},
            {"to_station", last.to_station},
            {"score", h.score}};
}

ModeModel mode_model_from_days(const std::vector<Trace>& days, const MetroNetwork& net) {
    for (const auto& d : days)
        if (!d.ground_truth) throw ValidationError("mixed-day trace without ground truth");
    return train_mode_model(days, net);
}

void print_accuracy(std::ostream& os, const std::string& title, const std::vector<LengthAccuracy>& acc) {
    os << title << "\n  length  runs  correct  accuracy\n";
    for (const auto& a : acc) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %6d  %4zu  %7zu  %7.1f%%\n", a.length, a.runs, a.correct,
                      100.0 * a.accuracy());
        os << buf;
    }
}

IntervalEnsemble train_supervised(const std::vector<Trace>& trips, const MetroNetwork& net,
                                  const BenchmarkConfig& cfg) {
    std::vector<const Trace*> ptrs;
    std::set<int> classes;  // observed labels; reverse augmentation does not count
    for (const auto& t : trips) {
        if (!t.ground_truth) throw ValidationError("training trip has no ground truth labels");
        for (const auto& r : *t.ground_truth)
            if (auto id = parse_interval_label(r.label)) classes.insert(*id);
        ptrs.push_back(&t);
    }
    if (classes.size() < 2)
        throw ValidationError("training data covers " + std::to_string(classes.size()) +
                              " interval(s); at least 2 classes are required");
    const auto td = supervised_training_data(ptrs, net, cfg.augment_reverse);
    return train_ensemble(td.data, td.features, cfg.ensemble, derive_seed(cfg.seed, "train"));
}

}  // namespace

json config_to_json(const BenchmarkConfig& c) { return c; }

BenchmarkConfig config_from_json(const json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    check_keys(j, config_to_json(BenchmarkConfig{}), "");
    BenchmarkConfig c;
    try {
        c = j.get<BenchmarkConfig>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("bad config value: ") + e.what());
    }
    if (c.line_length < 2) throw UsageError("line_length must be at least 2");
    if (c.trips < 1 || c.trip_length < 1 || c.trip_length > c.line_length)
        throw UsageError("trips must be positive and trip_length within the line");
    for (int n : c.lengths)
        if (n < 1 || n > c.trip_length) throw UsageError("evaluation lengths must lie in [1, trip_length]");
    try {
        c.noise.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    return c;
}

BenchmarkConfig load_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::vector<int> parse_lengths(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("bad length list '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError("empty length list");
    return out;
}

Corpus load_corpus(const fs::path& dir, const std::optional<fs::path>& network) {
    if (!fs::is_directory(dir)) throw IoError("corpus directory " + dir.string() + " not found");
    Corpus c;
    c.net.network = load_network(network ? *network : dir / "network.json");
    if (fs::exists(dir / "profiles.json")) c.net.profiles = load_profiles(dir / "profiles.json");
    c.trips = load_traces(list_files(dir / "trips", "trip_"));
    if (c.trips.empty()) throw ValidationError("corpus has no trips");
    if (fs::exists(dir / "summary.json")) {
        try {
            const auto s = json::parse(read_text_file(dir / "summary.json"));
            c.trip_seeds = s.at("trip_seeds").get<std::vector<std::uint64_t>>();
        } catch (const json::exception& e) {
            throw FormatError(std::string("bad summary.json: ") + e.what());
        }
    }
    return c;
}

// ---------------------------------------------------------------------------

int cmd_generate(const GenerateOptions& o) {
    const auto cfg = resolve_config(o.common, std::nullopt);
    const fs::path out = o.common.out.value_or("corpus");
    Corpus c = build_corpus(cfg);
    if (o.common.network) {
        // A supplied network must match the generated profiles one-to-one.
        auto net = load_network(*o.common.network);
        if (net.line_length() != c.net.network.line_length())
            throw ValidationError("network line length does not match config line_length");
        c.net.network = std::move(net);
    }
    fs::create_directories(out / "trips");
    fs::create_directories(out / "other");
    fs::create_directories(out / "mixed");
    fs::create_directories(out / "seeds");

    write_json(out / "config.json", config_to_json(cfg));
    save_network(c.net.network, out / "network.json");
    save_profiles(c.net.profiles, out / "profiles.json");
    for (std::size_t k = 0; k < c.trips.size(); ++k) save_trace(c.trips[k], out / "trips" / numbered("trip_", k));

    const OtherMode modes[] = {OtherMode::walk, OtherMode::bus, OtherMode::taxi, OtherMode::still};
    const std::uint64_t other_base = derive_seed(cfg.seed, "other");
    std::size_t others = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto t = gen_other_mode(modes[k], kOtherDuration, cfg.noise, derive_seed(other_base, k),
                                      c.net.network.sample_rate);
        save_trace(t, out / "other" / (std::string(to_string(modes[k])) + ".jsonl"));
        ++others;
    }

    const auto train_days = mixed_days(c, cfg, true);
    const auto test_days = mixed_days(c, cfg, false);
    for (std::size_t k = 0; k < train_days.size(); ++k)
        save_trace(train_days[k], out / "mixed" / numbered("train_", k, 2));
    for (std::size_t k = 0; k < test_days.size(); ++k)
        save_trace(test_days[k], out / "mixed" / numbered("test_", k, 2));

    json seeds = json::object();
    for (int s : distinctive_intervals(c.net)) {
        const auto rides = seed_rides(c, cfg, s);
        for (std::size_t k = 0; k < rides.size(); ++k)
            save_trace(rides[k], out / "seeds" / numbered("seed_" + std::to_string(s) + "_", k));
        seeds[std::to_string(s)] = rides.size();
    }

    json summary{{"seed", cfg.seed},
                 {"network", c.net.network.name},
                 {"line_length", c.net.network.line_length()},
                 {"trips", c.trips.size()},
                 {"trip_length", cfg.trip_length},
                 {"segments", c.trips.size() * static_cast<std::size_t>(cfg.trip_length)},
                 {"trip_seeds", c.trip_seeds},
                 {"other", others},
                 {"mixed_train", train_days.size()},
                 {"mixed_test", test_days.size()},
                 {"distinctive", distinctive_intervals(c.net)},
                 {"seeds", seeds}};
    write_json(out / "summary.json", summary);
    std::cout << "corpus " << out.string() << ": " << c.trips.size() << " trips x " << cfg.trip_length
              << " intervals, " << others << " non-metro traces, " << train_days.size() + test_days.size()
              << " mixed days, " << seeds.size() << " seed intervals\n";
    return kOk;
}

int cmd_train(const TrainOptions& o) {
    const auto cfg = resolve_config(o.common, o.corpus);
    const Corpus c = load_corpus(o.corpus, o.common.network);
    const auto& net = c.net.network;

    ModelBundle b;
    b.network_name = net.name;
    b.line_length = net.line_length();
    b.intervals = train_supervised(c.trips, net, cfg);
    const auto days = load_traces(list_files(o.corpus / "mixed", "train_"));
    if (!days.empty()) b.mode = mode_model_from_days(days, net);
    else spdlog::warn("no mixed training days; model has no mode classifier");

    const fs::path out = o.common.out.value_or(o.corpus / "model.json");
    save_model(b, out);
    std::cout << "model " << out.string() << ": " << b.intervals.class_count << " classes, "
              << b.intervals.forest.trees.size() << " trees, " << b.intervals.boosted.learners.size()
              << " boosted learners, mode model " << (b.mode ? "yes" : "no") << "\n";
    return kOk;
}

json attack_trace(const Trace& trace, const ModelBundle& model, const MetroNetwork& net, InferMode mode) {
    const auto enu = to_enu(trace.samples).samples;
    std::vector<MetroSpan> spans;
    if (model.mode) spans = extract_metro_spans(hra_values(enu), *model.mode);
    else if (!enu.empty()) spans.push_back({0, enu.size()});

    const auto seg = segmenter_params(net);
    TolerantConfig tc;
    tc.mode = mode;
    const double rate = trace.sample_rate;
    json out_spans = json::array();
    for (const auto& sp : spans) {
        json js{{"start_s", static_cast<double>(sp.start_index) / rate}, {"end_s", static_cast<double>(sp.end_index) / rate}};
        try {
            const auto res = infer_with_segment_tolerance(
                std::span<const EnuSample>(enu).subspan(sp.start_index, sp.length()), model.intervals, seg, net, tc);
            js["segments"] = res.segments.size();
            js["family"] = res.family;
            js["best"] = hypothesis_json(res.best, net);
            json top = json::array();
            for (std::size_t i = 0; i < res.top.size() && i < 3; ++i) top.push_back(hypothesis_json(res.top[i], net));
            js["top"] = top;
        } catch (const ValidationError& e) {
            js["skipped"] = e.what();
        }
        out_spans.push_back(std::move(js));
    }
    json report{{"device_id", trace.device_id}, {"mode", mode == InferMode::full ? "full" : "reduced"},
                {"spans", out_spans}};

    if (trace.ground_truth) {
        // Self-check: the true run is every labeled interval centred inside the span.
        json checks = json::array();
        for (const auto& js : report["spans"]) {
            const double a = js["start_s"].get<double>(), b = js["end_s"].get<double>();
            std::vector<int> ids;
            for (const auto& r : *trace.ground_truth) {
                const auto id = parse_interval_label(r.label);
                const double mid = 0.5 * (r.start + r.end);
                if (id && mid >= a && mid < b) ids.push_back(*id);
            }
            json c{{"true_intervals", ids}};
            c["correct"] = js.contains("best") && !ids.empty() &&
                           js["best"]["intervals"].get<std::vector<int>>() == ids;
            checks.push_back(std::move(c));
        }
        report["self_check"] = checks;
    }
    return report;
}

int cmd_attack(const AttackOptions& o) {
    if (!o.common.network) throw UsageError("attack needs --network");
    const auto model = load_model(o.model);
    const auto net = load_network(*o.common.network);
    if (net.line_length() != model.line_length)
        throw ValidationError("network line length does not match the model");
    const auto trace = load_trace(o.trace);
    const auto report = attack_trace(trace, model, net, o.mode);

    if (o.common.out) write_json(*o.common.out, report);
    else std::cout << report.dump(2) << "\n";

    std::ostream& table = o.common.out ? std::cout : std::cerr;
    if (report["spans"].empty()) table << "no metro span found\n";
    for (const auto& s : report["spans"]) {
        char buf[160];
        if (!s.contains("best")) {
            std::snprintf(buf, sizeof buf, "span %8.1f-%8.1f s  skipped\n", s["start_s"].get<double>(),
                          s["end_s"].get<double>());
        } else {
            const auto& b = s["best"];
            std::snprintf(buf, sizeof buf, "span %8.1f-%8.1f s  %s -> %s (%d intervals, %s)  score %.3f\n",
                          s["start_s"].get<double>(), s["end_s"].get<double>(),
                          b["from_station"].get<std::string>().c_str(), b["to_station"].get<std::string>().c_str(),
                          b["length"].get<int>(), b["direction"].get<std::string>().c_str(), b["score"].get<double>());
        }
        table << buf;
    }
    return kOk;
}

int cmd_bootstrap(const BootstrapOptions& o) {
    const auto cfg = resolve_config(o.common, o.corpus);
    const Corpus c = load_corpus(o.corpus, o.common.network);
    const auto& net = c.net.network;

    // Seed rides: seeds/seed_<interval>_<k>.jsonl
    std::map<int, std::vector<Trace>> rides;
    for (const auto& p : list_files(o.corpus / "seeds", "seed_")) {
        const auto stem = p.stem().string();
        const auto a = stem.find('_'), b = stem.rfind('_');
        int id = -1;
        try {
            id = std::stoi(stem.substr(a + 1, b - a - 1));
        } catch (const std::exception&) {
            throw FormatError("cannot read the seed interval from " + p.filename().string());
        }
        rides[id].push_back(load_trace(p));
    }
    if (rides.empty()) throw UsageError("bootstrap needs at least one seed interval (no files in seeds/)");

    const auto u = prepare_unlabeled(c.trips, net);
    std::map<int, std::vector<std::vector<double>>> seed_data;
    for (const auto& [id, list] : rides)
        for (const auto& r : list)
            for (auto& x : seed_features(r, id, u.features)) seed_data[id].push_back(std::move(x));

    const auto res = bootstrap(u.sequences, seed_data, forward_intervals(net), net.line_length(), u.features,
                               cfg.semisup, derive_seed(cfg.seed, "bootstrap"));

    json rounds = json::array();
    for (const auto& r : res.rounds) {
        json pools = json::object();
        for (const auto& [id, n] : r.pool_sizes) pools[std::to_string(id)] = n;
        rounds.push_back({{"round", r.round},
                          {"labeled_sequences", r.labeled_sequences},
                          {"skipped_sequences", r.skipped_sequences},
                          {"new_seeds", r.new_seeds},
                          {"pool_sizes", pools}});
    }
    std::size_t labeled = 0, correct = 0, checked = 0;
    for (std::size_t q = 0; q < u.sequences.size(); ++q) {
        const bool truth = c.trips[q].ground_truth.has_value();
        const auto tt = truth ? trip_truth(c.trips[q]) : TripTruth{};
        for (std::size_t i = 0; i < u.sequences[q].size(); ++i) {
            const int a = res.assigned[q][i];
            if (a < 0) continue;
            ++labeled;
            if (truth) {
                ++checked;
                correct += a == majority_interval(u.segments[q][i], tt);
            }
        }
    }
    json report{{"seeds", res.seeded},
                {"full_coverage", res.full_coverage},
                {"rounds", rounds},
                {"labeled_segments", labeled}};
    if (checked) report["label_accuracy"] = static_cast<double>(correct) / static_cast<double>(checked);

    const fs::path out = o.common.out.value_or(o.corpus / "bootstrap");
    fs::create_directories(out);
    write_json(out / "bootstrap.json", report);

    ModelBundle b;
    b.network_name = net.name;
    b.line_length = net.line_length();
    b.intervals = train_ensemble(res.pool.to_dataset(net.interval_count()), u.features, cfg.ensemble,
                                 derive_seed(cfg.seed, "bootstrap-model"));
    const auto days = load_traces(list_files(o.corpus / "mixed", "train_"));
    if (!days.empty()) b.mode = mode_model_from_days(days, net);
    save_model(b, out / "model.json");

    for (const auto& r : res.rounds) {
        std::cout << "round " << r.round << ": " << r.labeled_sequences << " sequences labeled, "
                  << r.skipped_sequences << " skipped, new seeds [";
        for (std::size_t i = 0; i < r.new_seeds.size(); ++i) std::cout << (i ? " " : "") << r.new_seeds[i];
        std::cout << "]\n";
    }
    std::cout << (res.full_coverage ? "full coverage" : "stalled before full coverage") << ", " << labeled
              << " segments labeled\n";
    return res.full_coverage ? kOk : kStall;
}

int cmd_evaluate(const EvaluateOptions& o) {
    auto cfg = resolve_config(o.common, o.corpus);
    if (o.lengths) cfg.lengths = *o.lengths;
    const std::set<std::string> known{"supervised", "semisupervised", "extraction", "segmentation", "all"};
    if (!known.count(o.protocol)) throw UsageError("unknown protocol '" + o.protocol + "'");
    const Corpus c = load_corpus(o.corpus, o.common.network);
    for (int n : cfg.lengths)
        if (n > static_cast<int>(trip_truth(c.trips.front()).intervals.size()))
            throw UsageError("evaluation length " + std::to_string(n) + " exceeds the trip length");
    if (cfg.robustness && c.trip_seeds.size() != c.trips.size()) {
        spdlog::warn("trip seeds unavailable; robustness variants disabled");
        cfg.robustness = false;
    }
    const bool all = o.protocol == "all";
    json report = json::object();
    std::ostringstream table;

    if (all || o.protocol == "extraction") {
        const auto r = run_extraction(c, cfg);
        report["extraction"] = to_json(r);
        char buf[160];
        std::snprintf(buf, sizeof buf, "extraction: coverage %.2f%%, %zu spans, %zu false positive\n",
                      100.0 * r.coverage, r.spans, r.false_positive_spans);
        table << buf;
    }
    if (all || o.protocol == "segmentation") {
        const auto r = run_segmentation(c, c.net.network);
        report["segmentation"] = to_json(r);
        char buf[96];
        std::snprintf(buf, sizeof buf, "segmentation: %.1f%% of trips within edit distance 2\n", 100.0 * r.within_two);
        table << buf;
    }
    if (all || o.protocol == "supervised") {
        const auto r = run_supervised(c, cfg);
        report["supervised"] = to_json(r);
        print_accuracy(table, "supervised trace accuracy", r.accuracy);
    }
    if (all || o.protocol == "semisupervised") {
        const auto r = run_semisupervised(c, cfg);
        report["semisupervised"] = to_json(r);
        print_accuracy(table, "semi-supervised trace accuracy", r.accuracy);
    }

    const fs::path out = o.common.out.value_or(o.corpus / "reports");
    fs::create_directories(out);
    write_json(out / ("report_" + o.protocol + ".json"), report);
    std::cout << table.str();
    return kOk;
}

}  // namespace cli
}  // namespace subtrace
