#include "subtrace/evalharness.hpp"

#include <algorithm>
#include <cmath>

#include "subtrace/coord.hpp"
#include "subtrace/log.hpp"
#include "subtrace/rng.hpp"

namespace subtrace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Metrics

int edit_distance(std::span<const double> a, std::span<const double> b, double tol) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (std::abs(a[i - 1] - b[j - 1]) < tol ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

std::vector<std::vector<double>> confusion_matrix(const std::vector<int>& pred, const std::vector<int>& truth,
                                                  int m) {
    if (pred.empty() || pred.size() != truth.size())
        throw ValidationError("confusion matrix needs equal-length, non-empty inputs");
    std::vector<std::vector<double>> c(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= m || pred[i] < 0 || pred[i] >= m)
            throw ValidationError("label outside confusion matrix");
        c[truth[i]][pred[i]] += 1.0;
    }
    for (auto& row : c) {
        double s = 0.0;
        for (double v : row) s += v;
        if (s > 0.0)
            for (double& v : row) v = 100.0 * v / s;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Ground truth

TripTruth trip_truth(const Trace& trace) {
    TripTruth t;
    if (!trace.ground_truth) return t;
    const double rate = trace.sample_rate;
    auto idx = [&](double s) { return static_cast<std::size_t>(std::max(0.0, std::round(s * rate))); };
    for (const auto& r : *trace.ground_truth) {
        if (auto id = parse_interval_label(r.label)) t.intervals.push_back({idx(r.start), idx(r.end), *id});
        else if (r.label == "dwell") t.dwells.emplace_back(idx(r.start), idx(r.end));
    }
    return t;
}

std::vector<Segment> truth_segments(const TripTruth& truth, std::size_t n) {
    std::vector<Segment> out;
    if (truth.intervals.empty()) return out;
    // Outer segments run to the trace ends, like the pipeline's.
    std::size_t prev = 0;
    for (std::size_t k = 0; k < truth.intervals.size(); ++k) {
        std::size_t end = n;
        if (k + 1 < truth.intervals.size()) {
            end = (truth.intervals[k].end_index + truth.intervals[k + 1].start_index) / 2;
        }
        end = std::min(end, n);
        out.push_back({prev, end, truth.intervals[k].true_interval});
        prev = end;
    }
    return out;
}

std::vector<double> truth_points(const TripTruth& truth, double rate) {
    std::vector<double> out;
    for (const auto& [a, b] : truth.dwells) out.push_back(0.5 * static_cast<double>(a + b) / rate);
    return out;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus build_corpus(const BenchmarkConfig& cfg) {
    Corpus c;
    c.net = gen_network(cfg.line_length, derive_seed(cfg.seed, "network"), cfg.network);
    const std::uint64_t base = derive_seed(cfg.seed, "trips");
    for (int k = 0; k < cfg.trips; ++k) {
        const std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(k));
        c.trip_seeds.push_back(s);
        c.trips.push_back(gen_trip(c.net.network, c.net.profiles, 0, cfg.trip_length, cfg.noise, s));
    }
    return c;
}

std::vector<ScheduleItem> random_schedule(const MetroNetwork& network, std::uint64_t seed) {
    Rng rng = make_rng(derive_seed(seed, "schedule"));
    const OtherMode modes[] = {OtherMode::walk, OtherMode::bus, OtherMode::taxi, OtherMode::still};
    auto other = [&]() {
        return ScheduleItem::other(modes[uniform_index(rng, 4)], std::round(uniform(rng, 90.0, 400.0)));
    };
    auto trip = [&]() {
        const int line = network.line_length();
        const int len = 2 + static_cast<int>(uniform_index(rng, 4));
        const int start = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(line - len + 1)));
        const Direction dir = uniform01(rng) < 0.5 ? Direction::forward : Direction::reverse;
        return ScheduleItem::trip(network.interval_id(dir, start), len);
    };
    std::vector<ScheduleItem> s{other(), trip(), other()};
    if (uniform01(rng) < 0.5) {
        s.push_back(trip());
        s.push_back(other());
    }
    return s;
}

std::vector<int> distinctive_intervals(const GeneratedNetwork& net) {
    std::vector<int> out;
    for (const auto& p : net.profiles)
        if (p.distinctive) out.push_back(p.interval_id);
    return out;
}

double metro_hra_scale(const std::vector<Trace>& trips) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : trips) {
        const auto enu = to_enu(t.samples).samples;
        for (const auto& iv : trip_truth(t).intervals)
            for (std::size_t i = iv.start_index; i < iv.end_index && i < enu.size(); ++i) {
                sum += enu[i].hra;
                ++n;
            }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

// ---------------------------------------------------------------------------
// Extraction

std::vector<Trace> mixed_days(const Corpus& c, const BenchmarkConfig& cfg, bool training) {
    const int count = training ? cfg.mixed_train_days : cfg.mixed_days;
    const std::uint64_t base = derive_seed(cfg.seed, training ? "train-days" : "test-days");
    std::vector<Trace> days;
    for (int k = 0; k < count; ++k) {
        const std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(k));
        days.push_back(gen_mixed_day(c.net.network, c.net.profiles, random_schedule(c.net.network, s), cfg.noise, s));
    }
    return days;
}

ModeModel train_mode_model(const std::vector<Trace>& days, const MetroNetwork& network) {
    const std::size_t w = extraction_window(network);
    std::vector<std::vector<double>> hras;
    std::vector<double> metro;
    for (const auto& d : days) {
        hras.push_back(hra_values(to_enu(d.samples).samples));
        const auto mask = metro_mask(hras.back().size(), d.sample_rate, *d.ground_truth);
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i]) metro.push_back(hras.back()[i]);
    }
    const auto th = metro_thresholds(metro);
    std::vector<LabeledWindow> rows;
    for (std::size_t k = 0; k < days.size(); ++k) {
        auto r = labeled_windows(hras[k], days[k].sample_rate, *days[k].ground_truth, w, th);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return train_mode_classifier(rows, th, w);
}

namespace {

std::size_t count_window_errors(std::span<const ModeLabel> labels, const std::vector<bool>& mask, std::size_t w) {
    std::size_t errors = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const std::size_t s = k * w, e = std::min(mask.size(), s + w);
        std::size_t metro = 0;
        for (std::size_t i = s; i < e; ++i) metro += mask[i];
        const bool truth = 2 * metro >= e - s;
        errors += truth != (labels[k] == ModeLabel::metro);
    }
    return errors;
}

}  // namespace

ExtractionReport run_extraction(const Corpus& corpus, const BenchmarkConfig& cfg) {
    const auto train = mixed_days(corpus, cfg, true);
    const auto test = mixed_days(corpus, cfg, false);
    const auto model = train_mode_model(train, corpus.net.network);

    ExtractionReport r;
    std::size_t metro_total = 0, metro_covered = 0;
    for (const auto& day : test) {
        const auto hra = hra_values(to_enu(day.samples).samples);
        const auto mask = metro_mask(hra.size(), day.sample_rate, *day.ground_truth);
        const auto labels = classify_windows(hra, model);
        r.windows += labels.size();
        r.window_errors += count_window_errors(labels, mask, model.window);
        r.refined_window_errors += count_window_errors(flip_isolated(labels), mask, model.window);
        const auto spans = refine_boundaries(labels, hra, model);
        std::vector<bool> inside(hra.size(), false);
        for (const auto& s : spans) {
            std::size_t metro = 0;
            for (std::size_t i = s.start_index; i < s.end_index; ++i) {
                inside[i] = true;
                metro += mask[i];
            }
            ++r.spans;
            if (2 * metro < s.length()) ++r.false_positive_spans;
        }
        for (std::size_t i = 0; i < hra.size(); ++i)
            if (mask[i]) {
                ++metro_total;
                metro_covered += inside[i];
            }
    }
    r.coverage = metro_total ? static_cast<double>(metro_covered) / metro_total : 1.0;
    return r;
}

// ---------------------------------------------------------------------------
// Segmentation

SegmentationReport run_segmentation(const Corpus& corpus, const MetroNetwork& network) {
    SegmentationReport r;
    const auto base = segmenter_params(network);
    const FeatureConfig fc;
    std::size_t good = 0;
    for (const auto& trip : corpus.trips) {
        const auto enu = to_enu(trip.samples).samples;
        const auto hra = smoothed_hra(enu, fc.smooth_k);
        const auto pts = find_final_segment_points(hra, with_threshold(base, hra)).points;
        std::vector<double> pred;
        for (auto p : pts) pred.push_back(static_cast<double>(p) / network.sample_rate);
        const auto truth = truth_points(trip_truth(trip), network.sample_rate);
        const int d = edit_distance(pred, truth);
        r.distances.push_back(d);
        good += d <= 2;
    }
    r.within_two = r.distances.empty() ? 0.0 : static_cast<double>(good) / r.distances.size();
    return r;
}

// ---------------------------------------------------------------------------
// Supervised protocol

int majority_interval(const Segment& segment, const TripTruth& truth) {
    std::size_t best = 0;
    int id = -1;
    for (const auto& iv : truth.intervals) {
        const std::size_t lo = std::max(segment.start_index, iv.start_index);
        const std::size_t hi = std::min(segment.end_index, iv.end_index);
        if (hi > lo && hi - lo > best) {
            best = hi - lo;
            id = *iv.true_interval;
        }
    }
    return id;
}

TruthScorer perfect_scorer(const Corpus& corpus) {
    std::vector<TripTruth> truths;
    for (const auto& t : corpus.trips) truths.push_back(trip_truth(t));
    return [truths](std::size_t trip, std::size_t s, std::size_t e, const std::vector<double>& row) {
        std::vector<double> out(row.size(), 0.0);
        const int id = majority_interval(Segment{s, e, std::nullopt}, truths[trip]);
        if (id >= 0) out[id] = 1.0;
        return out;
    };
}

int opposite_interval(const MetroNetwork& network, int id) {
    const Direction d = network.direction_of(id) == Direction::forward ? Direction::reverse : Direction::forward;
    return network.interval_id(d, network.line_length() - 1 - network.position_of(id));
}

std::vector<EnuSample> time_reversed(std::span<const EnuSample> segment) {
    std::vector<EnuSample> out(segment.rbegin(), segment.rend());
    const double t0 = segment.empty() ? 0.0 : segment.front().t;
    const double t1 = segment.empty() ? 0.0 : segment.back().t;
    for (auto& e : out) e.t = t0 + (t1 - e.t);
    return out;
}

TrainingData supervised_training_data(const std::vector<const Trace*>& trips, const MetroNetwork& network,
                                      bool augment_reverse, const FeatureConfig& base) {
    std::vector<std::vector<EnuSample>> enus;
    std::vector<std::vector<Segment>> segs;
    std::vector<std::span<const EnuSample>> views;
    for (const auto* t : trips) {
        enus.push_back(to_enu(t->samples).samples);
        segs.push_back(truth_segments(trip_truth(*t), enus.back().size()));
    }
    for (std::size_t k = 0; k < enus.size(); ++k)
        for (const auto& s : segs[k]) views.push_back(std::span<const EnuSample>(enus[k]).subspan(s.start_index, s.length()));
    TrainingData td;
    // Thresholds are on |component| percentiles, which time reversal leaves unchanged.
    td.features = fit_feature_config(views, base);
    td.data.class_count = network.interval_count();
    for (std::size_t k = 0; k < enus.size(); ++k)
        for (const auto& s : segs[k]) {
            const auto view = std::span<const EnuSample>(enus[k]).subspan(s.start_index, s.length());
            td.data.add(extract_features(view, td.features).to_vector(td.features), *s.true_interval);
            if (augment_reverse) {
                const auto rev = time_reversed(view);
                td.data.add(extract_features(rev, td.features).to_vector(td.features),
                            opposite_interval(network, *s.true_interval));
            }
        }
    return td;
}

namespace {

struct SubtripOutcome {
    int length = 0;
    TraceHypothesis predicted;
    bool correct = false;
    bool reduced_agrees = false;
};

std::vector<SubtripOutcome> evaluate_trip(const std::vector<EnuSample>& enu, const TripTruth& truth,
                                          const IntervalEnsemble& model, const MetroNetwork& net,
                                          const std::vector<int>& lengths, std::size_t trip_index,
                                          const TruthScorer& override_row) {
    const auto base = segmenter_params(net);
    const auto& fc = model.feature_config;
    const int line = net.line_length();
    std::vector<SubtripOutcome> out;
    const int total = static_cast<int>(truth.intervals.size());
    for (int n : lengths) {
        for (int j = 0; j + n <= total; ++j) {
            const std::size_t s = truth.intervals[j].start_index;
            const std::size_t e = std::min(enu.size(), truth.intervals[j + n - 1].end_index);
            const std::span<const EnuSample> span(enu.data() + s, e - s);
            RowScorer scorer = [&](std::size_t a, std::size_t b) {
                auto row = model.predict_row(extract_features(span.subspan(a, b - a), fc));
                return override_row ? override_row(trip_index, s + a, s + b, row) : row;
            };
            const auto res = infer_with_segment_tolerance(span, scorer, fc.smooth_k, min_segment_length(fc), base, net);
            const int first = *truth.intervals[j].true_interval;
            const TraceHypothesis want{net.direction_of(first), net.position_of(first), n, 0.0};
            SubtripOutcome o;
            o.length = n;
            o.predicted = res.best;
            o.correct = res.best.same_run(want);
            o.reduced_agrees = infer_trace(res.P, line, InferMode::full)
                                   .same_run(infer_trace(res.P, line, InferMode::reduced));
            out.push_back(o);
        }
    }
    return out;
}

void tally(std::vector<LengthAccuracy>& acc, const std::vector<SubtripOutcome>& outcomes) {
    for (const auto& o : outcomes) {
        auto it = std::find_if(acc.begin(), acc.end(), [&](const LengthAccuracy& a) { return a.length == o.length; });
        if (it == acc.end()) {
            acc.push_back({o.length, 0, 0});
            it = acc.end() - 1;
        }
        ++it->runs;
        it->correct += o.correct;
    }
}

}  // namespace

std::vector<LengthAccuracy> evaluate_subtrips(const std::vector<Trace>& trips, const IntervalEnsemble& model,
                                              const MetroNetwork& network, const std::vector<int>& lengths) {
    std::vector<LengthAccuracy> acc;
    for (int n : lengths) acc.push_back({n, 0, 0});
    for (std::size_t k = 0; k < trips.size(); ++k) {
        const auto enu = to_enu(trips[k].samples).samples;
        tally(acc, evaluate_trip(enu, trip_truth(trips[k]), model, network, lengths, k, nullptr));
    }
    return acc;
}

SupervisedReport run_supervised(const Corpus& corpus, const BenchmarkConfig& cfg, const TruthScorer& scorer) {
    const auto& net = corpus.net.network;
    const int line = net.line_length();
    const std::size_t n_trips = corpus.trips.size();
    if (n_trips < 2) throw ValidationError("leave-one-out needs at least two trips");

    SupervisedReport r;
    for (int n : cfg.lengths) {
        r.accuracy.push_back({n, 0, 0});
        if (cfg.robustness) {
            r.accuracy_no_shake.push_back({n, 0, 0});
            r.accuracy_defense.push_back({n, 0, 0});
        }
    }
    r.defense_amp = cfg.defense_factor * metro_hra_scale(corpus.trips);
    NoiseConfig calm = cfg.noise;
    calm.hand_shake_amp = 0.0;

    std::vector<int> seg_pred, seg_truth;
    double oob = 0.0;
    for (std::size_t fold = 0; fold < n_trips; ++fold) {
        std::vector<const Trace*> train;
        for (std::size_t k = 0; k < n_trips; ++k)
            if (k != fold) train.push_back(&corpus.trips[k]);
        const auto td = supervised_training_data(train, net, cfg.augment_reverse);
        const auto model = train_ensemble(td.data, td.features, cfg.ensemble, derive_seed(cfg.seed, fold));
        oob += model.forest.oob_accuracy;

        const Trace& test = corpus.trips[fold];
        const auto truth = trip_truth(test);
        const auto enu = to_enu(test.samples).samples;
        for (const auto& s : truth_segments(truth, enu.size())) {
            const auto row = model.predict_row(
                extract_features(std::span<const EnuSample>(enu).subspan(s.start_index, s.length()), td.features));
            seg_pred.push_back(argmax(row) % line);
            seg_truth.push_back(*s.true_interval % line);
        }

        const auto base = evaluate_trip(enu, truth, model, net, cfg.lengths, fold, scorer);
        tally(r.accuracy, base);
        for (const auto& o : base) {
            ++r.reduced_runs;
            r.reduced_agree += o.reduced_agrees;
        }
        if (cfg.robustness) {
            const int start = *truth.intervals.front().true_interval;
            const auto quiet = gen_trip(net, corpus.net.profiles, start, static_cast<int>(truth.intervals.size()),
                                        calm, corpus.trip_seeds[fold]);
            const auto quiet_out = evaluate_trip(to_enu(quiet.samples).samples, trip_truth(quiet), model, net,
                                                 cfg.lengths, fold, scorer);
            tally(r.accuracy_no_shake, quiet_out);
            for (std::size_t i = 0; i < base.size(); ++i) {
                ++r.shake_runs;
                r.shake_changed += !base[i].predicted.same_run(quiet_out[i].predicted);
            }
            const auto noisy = apply_defense_noise(test, r.defense_amp, derive_seed(corpus.trip_seeds[fold], "defense"));
            tally(r.accuracy_defense, evaluate_trip(to_enu(noisy.samples).samples, truth, model, net, cfg.lengths,
                                                    fold, scorer));
        }
        spdlog::info("fold {}/{} done", fold + 1, n_trips);
    }
    r.confusion = confusion_matrix(seg_pred, seg_truth, line);
    r.mean_oob = oob / static_cast<double>(n_trips);
    return r;
}

// ---------------------------------------------------------------------------
// Semi-supervised protocol

UnlabeledSet prepare_unlabeled(const std::vector<Trace>& trips, const MetroNetwork& network) {
    UnlabeledSet u;
    const auto base = segmenter_params(network);
    std::vector<std::span<const EnuSample>> views;
    for (const auto& trip : trips) {
        u.enus.push_back(to_enu(trip.samples).samples);
        const auto hra = smoothed_hra(u.enus.back(), FeatureConfig{}.smooth_k);
        const auto pts = find_final_segment_points(hra, with_threshold(base, hra)).points;
        u.segments.push_back(to_segments(0, u.enus.back().size(), pts));
    }
    for (std::size_t k = 0; k < trips.size(); ++k)
        for (const auto& s : u.segments[k])
            views.push_back(std::span<const EnuSample>(u.enus[k]).subspan(s.start_index, s.length()));
    u.features = fit_feature_config(views);
    // Every trip is one unlabeled sequence.
    for (std::size_t k = 0; k < trips.size(); ++k) {
        SegmentSequence seq;
        for (const auto& s : u.segments[k])
            seq.push_back(extract_features(std::span<const EnuSample>(u.enus[k]).subspan(s.start_index, s.length()),
                                           u.features)
                              .to_vector(u.features));
        u.sequences.push_back(std::move(seq));
    }
    return u;
}

std::vector<Trace> seed_rides(const Corpus& corpus, const BenchmarkConfig& cfg, int seed_interval) {
    // Ride through the seed with its neighbours so the seed segment carries
    // the same half-dwell padding as pipeline segments.
    const auto& net = corpus.net.network;
    const int line = net.line_length();
    const int pos = net.position_of(seed_interval);
    const int first = std::max(0, pos - 1);
    const int len = std::min(line - 1, pos + 1) - first + 1;
    const int start = net.interval_id(net.direction_of(seed_interval), first);
    const std::uint64_t base = derive_seed(cfg.seed, "seed-rides");
    std::vector<Trace> rides;
    for (int k = 0; k < cfg.seed_extra; ++k)
        rides.push_back(gen_trip(net, corpus.net.profiles, start, len, cfg.noise,
                                 derive_seed(base, static_cast<std::uint64_t>(seed_interval * 1000 + k))));
    return rides;
}

std::vector<std::vector<double>> seed_features(const Trace& ride, int seed_interval, const FeatureConfig& fc) {
    if (!ride.ground_truth) throw ValidationError("seed ride has no ground truth");
    std::vector<std::vector<double>> out;
    const auto enu = to_enu(ride.samples).samples;
    for (const auto& seg : truth_segments(trip_truth(ride), enu.size()))
        if (seg.true_interval == seed_interval)
            out.push_back(
                extract_features(std::span<const EnuSample>(enu).subspan(seg.start_index, seg.length()), fc).to_vector(fc));
    return out;
}

std::vector<int> forward_intervals(const MetroNetwork& network) {
    std::vector<int> out;
    for (int p = 0; p < network.line_length(); ++p) out.push_back(network.interval_id(Direction::forward, p));
    return out;
}

SemisupReport run_semisupervised(const Corpus& corpus, const BenchmarkConfig& cfg) {
    const auto& net = corpus.net.network;
    const int line = net.line_length();
    SemisupReport r;
    r.seeds = distinctive_intervals(corpus.net);
    if (r.seeds.empty()) throw ValidationError("network has no distinctive interval to seed from");

    const auto u = prepare_unlabeled(corpus.trips, net);
    const auto& fc = u.features;
    r.sequences = u.sequences.size();

    std::map<int, std::vector<std::vector<double>>> seed_data;
    for (int s : r.seeds)
        for (const auto& ride : seed_rides(corpus, cfg, s))
            for (auto& x : seed_features(ride, s, fc)) seed_data[s].push_back(std::move(x));

    r.bootstrap = bootstrap(u.sequences, seed_data, forward_intervals(net), line, fc, cfg.semisup,
                            derive_seed(cfg.seed, "bootstrap"));
    for (std::size_t q = 0; q < u.sequences.size(); ++q) {
        const auto truth = trip_truth(corpus.trips[q]);
        for (std::size_t i = 0; i < u.sequences[q].size(); ++i) {
            const int a = r.bootstrap.assigned[q][i];
            if (a < 0) continue;
            ++r.labeled_segments;
            r.correct_labels += a == majority_interval(u.segments[q][i], truth);
        }
    }

    // Leave-one-out like the supervised protocol: the held-out trip's own
    // pseudo-labels are dropped before training.
    for (int n : cfg.lengths) r.accuracy.push_back({n, 0, 0});
    for (std::size_t fold = 0; fold < corpus.trips.size(); ++fold) {
        const auto data = r.bootstrap.pool.to_dataset(net.interval_count(), static_cast<int>(fold));
        const auto model =
            train_ensemble(data, fc, cfg.ensemble, derive_seed(derive_seed(cfg.seed, "semisup-model"), fold));
        tally(r.accuracy,
              evaluate_trip(u.enus[fold], trip_truth(corpus.trips[fold]), model, net, cfg.lengths, fold, nullptr));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Report JSON

json to_json(const ExtractionReport& r) {
    return {{"coverage", r.coverage},
            {"spans", r.spans},
            {"false_positive_spans", r.false_positive_spans},
            {"windows", r.windows},
            {"window_errors_raw", r.window_errors},
            {"window_errors_after_flip", r.refined_window_errors}};
}

json to_json(const SegmentationReport& r) {
    return {{"distances", r.distances}, {"within_two", r.within_two}};
}

json to_json(const std::vector<LengthAccuracy>& acc) {
    json a = json::array();
    for (const auto& x : acc)
        a.push_back({{"length", x.length}, {"runs", x.runs}, {"correct", x.correct}, {"accuracy", x.accuracy()}});
    return a;
}

json to_json(const SupervisedReport& r) {
    return {{"accuracy", to_json(r.accuracy)},
            {"accuracy_no_hand_shake", to_json(r.accuracy_no_shake)},
            {"accuracy_defense", to_json(r.accuracy_defense)},
            {"defense_amp", r.defense_amp},
            {"confusion", r.confusion},
            {"reduced_runs", r.reduced_runs},
            {"reduced_agree", r.reduced_agree},
            {"hand_shake_runs", r.shake_runs},
            {"hand_shake_changed", r.shake_changed},
            {"mean_oob_accuracy", r.mean_oob}};
}

json to_json(const SemisupReport& r) {
    json rounds = json::array();
    for (const auto& rr : r.bootstrap.rounds) {
        json sizes = json::object();
        for (const auto& [id, n] : rr.pool_sizes) sizes[std::to_string(id)] = n;
        rounds.push_back({{"round", rr.round},
                          {"new_seeds", rr.new_seeds},
                          {"pool_sizes", sizes},
                          {"labeled_sequences", rr.labeled_sequences},
                          {"skipped_sequences", rr.skipped_sequences}});
    }
    return {{"seeds", r.seeds},
            {"rounds", rounds},
            {"full_coverage", r.bootstrap.full_coverage},
            {"sequences", r.sequences},
            {"labeled_segments", r.labeled_segments},
            {"correct_labels", r.correct_labels},
            {"accuracy", to_json(r.accuracy)}};
}

}  // namespace subtrace
