#include "subtrace/serialize.hpp"

#include <cmath>
#include <limits>

namespace subtrace {

using nlohmann::json;

namespace {

// JSON has no infinities; absent classes carry log-prior -inf.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) throw FormatError("refusing to serialize NaN");
    return v > 0 ? "inf" : "-inf";
}

double num_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw FormatError("expected a number, got " + j.dump());
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> nums_from(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(num_from(x));
    return out;
}

json nums2(const std::vector<std::vector<double>>& v) {
    json a = json::array();
    for (const auto& r : v) a.push_back(nums(r));
    return a;
}

std::vector<std::vector<double>> nums2_from(const json& j) {
    std::vector<std::vector<double>> out;
    for (const auto& r : j) out.push_back(nums_from(r));
    return out;
}

json nb_to_json(const GaussianNB& nb) {
    json present = json::array();
    for (bool p : nb.present) present.push_back(p);
    return {{"class_count", nb.class_count},
            {"present", present},
            {"log_prior", nums(nb.log_prior)},
            {"mean", nums2(nb.mean)},
            {"var", nums2(nb.var)}};
}

GaussianNB nb_from_json(const json& j) {
    GaussianNB nb;
    nb.class_count = j.at("class_count").get<int>();
    for (const auto& p : j.at("present")) nb.present.push_back(p.get<bool>());
    nb.log_prior = nums_from(j.at("log_prior"));
    nb.mean = nums2_from(j.at("mean"));
    nb.var = nums2_from(j.at("var"));
    const auto k = static_cast<std::size_t>(nb.class_count);
    if (nb.present.size() != k || nb.log_prior.size() != k || nb.mean.size() != k || nb.var.size() != k)
        throw FormatError("naive Bayes block has inconsistent class counts");
    return nb;
}

// Nodes are packed as [feature, threshold, left, right] or [-1, hist...].
json tree_to_json(const DecisionTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        if (n.feature < 0) {
            json leaf = json::array({-1});
            for (double h : n.hist) leaf.push_back(h);
            nodes.push_back(std::move(leaf));
        } else {
            nodes.push_back(json::array({n.feature, num(n.threshold), n.left, n.right}));
        }
    }
    return nodes;
}

DecisionTree tree_from_json(const json& j, int class_count) {
    DecisionTree t;
    for (const auto& a : j) {
        TreeNode n;
        n.feature = a.at(0).get<int>();
        if (n.feature < 0) {
            for (std::size_t i = 1; i < a.size(); ++i) n.hist.push_back(a.at(i).get<double>());
            if (static_cast<int>(n.hist.size()) != class_count) throw FormatError("leaf histogram size mismatch");
        } else {
            if (a.size() != 4) throw FormatError("malformed tree node");
            n.threshold = num_from(a.at(1));
            n.left = a.at(2).get<int>();
            n.right = a.at(3).get<int>();
        }
        t.nodes.push_back(std::move(n));
    }
    const int size = static_cast<int>(t.nodes.size());
    if (size == 0) throw FormatError("empty tree");
    for (const auto& n : t.nodes)
        if (n.feature >= 0 && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size))
            throw FormatError("tree child index out of range");
    return t;
}

}  // namespace

json to_json(const ModeModel& m) {
    json comps = json::array();
    for (const auto& c : m.components)
        comps.push_back({{"label", c.label == ModeLabel::metro ? "metro" : "non-metro"},
                         {"log_prior", c.log_prior},
                         {"mean", c.mean},
                         {"var", c.var}});
    return {{"version", ModeModel::kVersion}, {"window", m.window}, {"thresholds", m.thresholds}, {"components", comps}};
}

ModeModel mode_model_from_json(const json& j) {
    if (j.at("version").get<int>() != ModeModel::kVersion) throw FormatError("unsupported mode model version");
    ModeModel m;
    m.window = j.at("window").get<std::size_t>();
    m.thresholds = j.at("thresholds").get<Thresholds>();
    for (const auto& c : j.at("components")) {
        ModeComponent comp;
        const auto label = c.at("label").get<std::string>();
        if (label != "metro" && label != "non-metro") throw FormatError("unknown mode label '" + label + "'");
        comp.label = label == "metro" ? ModeLabel::metro : ModeLabel::non_metro;
        comp.log_prior = c.at("log_prior").get<double>();
        comp.mean = c.at("mean").get<std::array<double, 5>>();
        comp.var = c.at("var").get<std::array<double, 5>>();
        for (double v : comp.var)
            if (!(v > 0.0)) throw FormatError("mode model variance must be positive");
        m.components.push_back(comp);
    }
    if (m.window == 0 || m.components.empty()) throw FormatError("mode model is empty");
    return m;
}

json to_json(const FeatureConfig& c) {
    return {{"smooth_k", c.smooth_k},
            {"peak_windows", c.peak_windows},
            {"thresholds", c.thresholds},
            {"use_peaks", c.use_peaks}};
}

FeatureConfig feature_config_from_json(const json& j) {
    FeatureConfig c;
    c.smooth_k = j.at("smooth_k").get<std::size_t>();
    c.peak_windows = j.at("peak_windows").get<std::vector<std::size_t>>();
    c.thresholds = j.at("thresholds").get<std::array<std::array<double, 3>, 3>>();
    c.use_peaks = j.at("use_peaks").get<bool>();
    if (c.smooth_k == 0) throw FormatError("smooth_k must be positive");
    if (c.use_peaks && c.peak_windows.empty()) throw FormatError("peak windows missing");
    return c;
}

json to_json(const IntervalEnsemble& e) {
    json learners = json::array();
    for (const auto& nb : e.boosted.learners) learners.push_back(nb_to_json(nb));
    json trees = json::array();
    for (const auto& t : e.forest.trees) trees.push_back(tree_to_json(t));
    return {{"class_count", e.class_count},
            {"dimension", e.dimension},
            {"feature_config", to_json(e.feature_config)},
            {"boosted", {{"alpha", nums(e.boosted.alpha)}, {"train_error", nums(e.boosted.train_error)}, {"learners", learners}}},
            {"forest", {{"oob_accuracy", e.forest.oob_accuracy}, {"trees", trees}}}};
}

IntervalEnsemble ensemble_from_json(const json& j) {
    IntervalEnsemble e;
    e.class_count = j.at("class_count").get<int>();
    e.dimension = j.at("dimension").get<std::size_t>();
    e.feature_config = feature_config_from_json(j.at("feature_config"));
    if (e.class_count < 2) throw FormatError("ensemble needs at least two classes");
    if (e.dimension != e.feature_config.dimension()) throw FormatError("feature dimension does not match config");

    const auto& b = j.at("boosted");
    e.boosted.class_count = e.class_count;
    e.boosted.alpha = nums_from(b.at("alpha"));
    e.boosted.train_error = nums_from(b.at("train_error"));
    for (const auto& l : b.at("learners")) {
        e.boosted.learners.push_back(nb_from_json(l));
        if (e.boosted.learners.back().class_count != e.class_count) throw FormatError("learner class count mismatch");
    }
    if (e.boosted.learners.size() != e.boosted.alpha.size()) throw FormatError("boosting weights do not match learners");

    const auto& f = j.at("forest");
    e.forest.class_count = e.class_count;
    e.forest.oob_accuracy = f.at("oob_accuracy").get<double>();
    for (const auto& t : f.at("trees")) e.forest.trees.push_back(tree_from_json(t, e.class_count));
    if (e.boosted.learners.empty() && e.forest.trees.empty()) throw FormatError("ensemble has no members");
    return e;
}

json to_json(const ModelBundle& b) {
    json j{{"format", kModelFormat},
           {"version", kModelVersion},
           {"network", b.network_name},
           {"line_length", b.line_length},
           {"intervals", to_json(b.intervals)}};
    j["mode"] = b.mode ? to_json(*b.mode) : json(nullptr);
    return j;
}

ModelBundle bundle_from_json(const json& j) {
    try {
        if (!j.is_object() || j.value("format", std::string{}) != kModelFormat)
            throw FormatError("not a subtrace model file");
        const int version = j.at("version").get<int>();
        if (version != kModelVersion)
            throw FormatError("unsupported model version " + std::to_string(version) + " (expected " +
                              std::to_string(kModelVersion) + ")");
        ModelBundle b;
        b.network_name = j.at("network").get<std::string>();
        b.line_length = j.at("line_length").get<int>();
        if (!j.at("mode").is_null()) b.mode = mode_model_from_json(j.at("mode"));
        b.intervals = ensemble_from_json(j.at("intervals"));
        if (b.intervals.class_count != 2 * b.line_length) throw FormatError("class count does not match the line");
        return b;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const ModelBundle& b, const std::filesystem::path& path) {
    write_text_file(path, to_json(b).dump() + "\n");
}

ModelBundle load_model(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError("model file " + path.string() + " is not valid JSON: " + e.what());
    }
    return bundle_from_json(j);
}

}  // namespace subtrace
