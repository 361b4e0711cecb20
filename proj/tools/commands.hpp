#pragma once

// Subcommands behind the `subtrace` binary. Each returns a process exit code;
// errors surface as exceptions that main() maps onto codes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subtrace/evalharness.hpp"
#include "subtrace/serialize.hpp"

namespace subtrace::cli {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kStall = 4 };

/// Bad arguments or config; exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Benchmark parameters plus an optional network file override.
struct PipelineConfig {
    BenchmarkConfig bench;
    std::optional<std::filesystem::path> network;
};

nlohmann::json config_to_json(const BenchmarkConfig& c);
/// Unknown keys are rejected so typos do not silently fall back to defaults.
BenchmarkConfig config_from_json(const nlohmann::json& j);
BenchmarkConfig load_config(const std::filesystem::path& path);

struct CommonOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> network;
};

struct GenerateOptions {
    CommonOptions common;
};

struct TrainOptions {
    CommonOptions common;
    std::filesystem::path corpus;
};

struct AttackOptions {
    CommonOptions common;
    std::filesystem::path model;
    std::filesystem::path trace;
    InferMode mode = InferMode::full;
};

struct BootstrapOptions {
    CommonOptions common;
    std::filesystem::path corpus;
};

struct EvaluateOptions {
    CommonOptions common;
    std::filesystem::path corpus;
    std::string protocol = "supervised";
    std::optional<std::vector<int>> lengths;
};

int cmd_generate(const GenerateOptions& o);
int cmd_train(const TrainOptions& o);
int cmd_attack(const AttackOptions& o);
int cmd_bootstrap(const BootstrapOptions& o);
int cmd_evaluate(const EvaluateOptions& o);

/// Reads a corpus directory written by cmd_generate.
Corpus load_corpus(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& network = {});

/// Attack report for one trace; exposed for tests.
nlohmann::json attack_trace(const Trace& trace, const ModelBundle& model, const MetroNetwork& network,
                            InferMode mode);

std::vector<int> parse_lengths(const std::string& text);

}  // namespace subtrace::cli
