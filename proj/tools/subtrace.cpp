// subtrace: generate | train | attack | bootstrap | evaluate

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "subtrace/log.hpp"

using namespace subtrace;
using namespace subtrace::cli;

namespace {

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option_function<std::string>("--config", [&o](const std::string& v) { o.config = v; },
                                          "JSON config file");
    app->add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t v) { o.seed = v; }, "root seed");
    app->add_option_function<std::string>("--out", [&o](const std::string& v) { o.out = v; }, "output path");
    app->add_option_function<std::string>("--network", [&o](const std::string& v) { o.network = v; },
                                          "network file");
}

}  // namespace

int main(int argc, char** argv) {
    init_logging();
    CLI::App app{"Metro trip inference from accelerometer traces"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "write a synthetic corpus");
    add_common(g, gen.common);

    TrainOptions train;
    auto* t = app.add_subcommand("train", "train mode and interval models on a labeled corpus");
    add_common(t, train.common);
    t->add_option("--corpus", train.corpus, "corpus directory")->required();

    AttackOptions attack;
    std::string mode = "full";
    auto* a = app.add_subcommand("attack", "infer metro trips in a trace");
    add_common(a, attack.common);
    a->add_option("--model", attack.model, "model file")->required();
    a->add_option("--trace", attack.trace, "trace file (JSON lines)")->required();
    a->add_option("--mode", mode, "full or reduced")->check(CLI::IsMember({"full", "reduced"}));

    BootstrapOptions boot;
    auto* b = app.add_subcommand("bootstrap", "label a corpus from seed intervals and train on the pool");
    add_common(b, boot.common);
    b->add_option("--corpus", boot.corpus, "corpus directory")->required();

    EvaluateOptions eval;
    std::string lengths;
    auto* e = app.add_subcommand("evaluate", "run an experiment protocol");
    add_common(e, eval.common);
    e->add_option("--corpus", eval.corpus, "corpus directory")->required();
    e->add_option("--protocol", eval.protocol, "supervised, semisupervised, extraction, segmentation or all");
    e->add_option("--lengths", lengths, "comma-separated subtrip lengths, e.g. 3,5,7");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*t) return cmd_train(train);
        if (*a) {
            attack.mode = mode == "reduced" ? InferMode::reduced : InferMode::full;
            return cmd_attack(attack);
        }
        if (*b) return cmd_bootstrap(boot);
        if (!lengths.empty()) eval.lengths = parse_lengths(lengths);
        return cmd_evaluate(eval);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kUsage;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kData;
    } catch (const std::filesystem::filesystem_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kData;
    }
}
