#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gluconet/pipeline.hpp"

namespace gluconet::config {

/// Sectioned key=value configuration ([section] headers, '#' comments).
class KvConfig {
public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_text(const std::string& text, const std::string& origin = "<text>");

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    bool empty() const { return values_.empty(); }

    /// Deterministic section-sorted key-sorted dump.
    std::string canonical_dump() const;

    /// Keys never read back through get(); used to reject typos.
    std::vector<std::string> unconsumed() const;

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    mutable std::map<std::string, std::map<std::string, bool>> consumed_;
};

/// Layered resolution (defaults < file) of the experiment configuration.
/// CLI flags are applied on top by the tool itself.
pipeline::ExperimentConfig experiment_from_kv(const KvConfig& kv);

/// Full canonical echo of a resolved configuration, suitable for hashing and
/// for reproducing the run.
std::string experiment_to_text(const pipeline::ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& data);
std::uint64_t hash_file(const std::string& path);

/// Reproducibility manifest: tool version, subcommand, resolved config hash +
/// echo, seed and input hashes. Contains no timestamps so reruns are
/// byte-identical.
struct Manifest {
    std::string subcommand;
    unsigned seed = 0;
    std::string config_text;
    std::vector<std::pair<std::string, std::uint64_t>> inputs;  // path, content hash
};

void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace gluconet::config
