#pragma once
// Run manifest written into every output directory: inputs, config
// fingerprints, row counts and diagnostics of the stage that produced it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace qf {

inline constexpr const char* kToolName = "quoteforest";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> inputs;        // name -> path as given
    std::map<std::string, std::string> input_hashes;  // name -> fnv1a64 of bytes
    std::map<std::string, std::string> flags;
    std::map<std::string, std::int64_t> row_counts;
    std::map<std::string, std::int64_t> diagnostics;
    std::map<std::string, std::string> stats;  // formatted numeric diagnostics

    void add_input(const std::string& name, const std::filesystem::path& path);
    std::string to_json() const;
};

void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir);

}  // namespace qf
