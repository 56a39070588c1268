#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace eulerlab::cli {

using Json = nlohmann::ordered_json;

/// Command-line overrides applied on top of the config file.
struct RunOptions {
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::uint64_t> seed_override;
    int jobs = 0;  // 0 keeps the library default
};

/// Result of parsing and range-checking a config without running it.
struct Diagnostics {
    std::vector<std::string> errors;
    std::vector<std::pair<std::string, std::string>> derived;  // name, value
    bool ok() const { return errors.empty(); }
};

struct Outcome {
    int exit_code = 1;
    std::string summary;  // one-line verdict
    std::filesystem::path output_dir;
};

/// Experiments accepted in the "experiment" key.
const std::vector<std::string>& experiment_names();

/// Reads a JSON config file; throws ConfigError naming the file on I/O or syntax errors.
Json load_config(const std::filesystem::path& path);

Diagnostics validate_config(const Json& config, const RunOptions& options = {});

/// Validates, executes and writes report.json, metadata.json, manifest.json, CSV series and
/// snapshots into the output directory. Exit codes: 0 pass/complete, 1 configuration or
/// runtime error, 2 certificate failure, 3 hypothesis not met.
Outcome run_config(const Json& config, const RunOptions& options = {});

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Config hash: FNV-1a of the compact dump of the effective config (after overrides).
std::string config_hash(const Json& config, const RunOptions& options = {});

}  // namespace eulerlab::cli
