#include "subtrace/semisup.hpp"

#include <algorithm>

#include "subtrace/log.hpp"
#include "subtrace/rng.hpp"

namespace subtrace {

std::pair<bool, double> SeedClassifier::classify(const std::vector<double>& x) const {
    const double p = model.predict_row(x)[1];
    return {p >= threshold, p};
}

SeedClassifier build_seed_classifier(int interval_id, const std::vector<std::vector<double>>& positives,
                                     const std::vector<std::vector<double>>& negatives,
                                     const FeatureConfig& cfg, const SemisupParams& params,
                                     std::uint64_t seed) {
    if (positives.size() < 5) throw ValidationError("seed classifier needs at least 5 positives");
    if (negatives.empty()) throw ValidationError("seed classifier needs negatives");
    Dataset d;
    d.class_count = 2;
    for (const auto& x : positives) d.add(x, 1);
    for (const auto& x : negatives) d.add(x, 0);
    SeedClassifier c;
    c.interval_id = interval_id;
    c.threshold = params.hit_threshold;
    c.model = train_ensemble(d, cfg, params.ensemble, seed);
    return c;
}

std::size_t LabelPool::count(int interval) const {
    const auto it = lists.find(interval);
    return it == lists.end() ? 0 : it->second.size();
}

Dataset LabelPool::to_dataset(int class_count, int exclude_sequence) const {
    Dataset d;
    d.class_count = class_count;
    for (const auto& [id, items] : lists)
        for (const auto& it : items)
            if (exclude_sequence < 0 || it.sequence != exclude_sequence) d.add(it.x, id, it.weight);
    return d;
}

std::vector<std::pair<int, int>> propagate_labels(int len, int p, int seed_interval, int line) {
    std::vector<std::pair<int, int>> out;
    const int base = seed_interval >= line ? line : 0;
    const int pos = seed_interval - base;
    for (int i = 0; i < len; ++i) {
        const int q = pos + (i - p);
        if (q >= 0 && q < line) out.emplace_back(i, base + q);
    }
    return out;
}

std::optional<ImpliedRun> resolve_conflicts(const std::vector<Hit>& hits, int line, double margin) {
    if (hits.empty()) return std::nullopt;
    std::vector<ImpliedRun> runs;
    for (const auto& h : hits) {
        const Direction dir = h.interval >= line ? Direction::reverse : Direction::forward;
        const int start = (h.interval % line) - h.position;
        auto it = std::find_if(runs.begin(), runs.end(),
                               [&](const ImpliedRun& r) { return r.direction == dir && r.start == start; });
        if (it == runs.end()) runs.push_back({dir, start, h.confidence});
        else it->weight += h.confidence;
    }
    std::stable_sort(runs.begin(), runs.end(),
                     [](const ImpliedRun& a, const ImpliedRun& b) { return a.weight > b.weight; });
    if (runs.size() > 1 && runs[0].weight < margin * runs[1].weight) return std::nullopt;
    return runs[0];
}

BootstrapResult bootstrap(const std::vector<SegmentSequence>& unlabeled,
                          const std::map<int, std::vector<std::vector<double>>>& seed_data,
                          const std::vector<int>& targets, int line, const FeatureConfig& cfg,
                          const SemisupParams& params, std::uint64_t seed) {
    if (seed_data.empty()) throw ValidationError("bootstrap needs at least one seed");
    Rng rng = make_rng(derive_seed(seed, "bootstrap"));

    BootstrapResult res;
    res.pool.enough_threshold = params.enough;
    for (const auto& [id, rows] : seed_data)
        for (const auto& x : rows) res.pool.lists[id].push_back({x, 1.0, 0});
    res.assigned.resize(unlabeled.size());
    for (std::size_t s = 0; s < unlabeled.size(); ++s) res.assigned[s].assign(unlabeled[s].size(), -1);
    std::vector<bool> done(unlabeled.size(), false);

    auto sample_unlabeled = [&](std::size_t k) {
        std::vector<std::pair<std::size_t, std::size_t>> free;
        for (std::size_t s = 0; s < unlabeled.size(); ++s)
            if (!done[s])
                for (std::size_t i = 0; i < unlabeled[s].size(); ++i) free.emplace_back(s, i);
        std::vector<std::vector<double>> out;
        for (std::size_t j = 0; j < k && !free.empty(); ++j) {
            const std::size_t pick = uniform_index(rng, free.size());
            out.push_back(unlabeled[free[pick].first][free[pick].second]);
            free[pick] = free.back();
            free.pop_back();
        }
        return out;
    };
    auto make_seed = [&](int id) {
        std::vector<std::vector<double>> pos, neg;
        for (const auto& it : res.pool.lists[id]) pos.push_back(it.x);
        for (const auto& [other, items] : res.pool.lists)
            if (other != id)
                for (const auto& it : items) neg.push_back(it.x);
        // Unlabeled negatives inevitably include some true positives; keep
        // them a minority of the unlabeled pool.
        std::size_t total = 0;
        for (const auto& seq : unlabeled) total += seq.size();
        const auto extra = sample_unlabeled(std::min(params.negative_sample, total / 4));
        neg.insert(neg.end(), extra.begin(), extra.end());
        return build_seed_classifier(id, pos, neg, cfg, params,
                                     derive_seed(seed, static_cast<std::uint64_t>(id) + 1000));
    };

    std::vector<SeedClassifier> seeds;
    for (const auto& [id, rows] : seed_data) {
        seeds.push_back(make_seed(id));
        res.seeded.push_back(id);
    }
    auto covered = [&]() {
        return std::all_of(targets.begin(), targets.end(), [&](int t) {
            return std::find(res.seeded.begin(), res.seeded.end(), t) != res.seeded.end();
        });
    };

    for (int round = 1; round <= params.max_rounds && !covered(); ++round) {
        RoundReport rep;
        rep.round = round;
        const double weight = round == 1 ? 1.0 : params.late_weight;
        for (std::size_t s = 0; s < unlabeled.size(); ++s) {
            if (done[s]) continue;
            const auto& seq = unlabeled[s];
            std::vector<Hit> hits;
            for (const auto& c : seeds)
                for (std::size_t i = 0; i < seq.size(); ++i) {
                    const auto [hit, conf] = c.classify(seq[i]);
                    if (hit) hits.push_back({static_cast<int>(i), c.interval_id, conf});
                }
            if (hits.empty()) continue;
            const auto run = resolve_conflicts(hits, line, params.margin);
            if (!run) {
                ++rep.skipped_sequences;
                continue;
            }
            const int anchor = run->start >= 0 ? 0 : -run->start;
            const int base = run->direction == Direction::forward ? 0 : line;
            for (const auto& [i, id] : propagate_labels(static_cast<int>(seq.size()), anchor,
                                                        base + run->start + anchor, line)) {
                res.pool.lists[id].push_back({seq[i], weight, round, static_cast<int>(s)});
                res.assigned[s][i] = id;
            }
            done[s] = true;
            ++rep.labeled_sequences;
        }
        for (int t : targets) {
            if (std::find(res.seeded.begin(), res.seeded.end(), t) != res.seeded.end()) continue;
            if (!res.pool.enough(t)) continue;
            seeds.push_back(make_seed(t));
            res.seeded.push_back(t);
            rep.new_seeds.push_back(t);
        }
        for (const auto& [id, items] : res.pool.lists) rep.pool_sizes[id] = items.size();
        spdlog::info("bootstrap round {}: {} sequences labeled, {} skipped, {} new seeds", round,
                     rep.labeled_sequences, rep.skipped_sequences, rep.new_seeds.size());
        const bool stalled = rep.new_seeds.empty();
        res.rounds.push_back(std::move(rep));
        if (stalled) break;
    }
    res.full_coverage = covered();
    return res;
}

}  // namespace subtrace
