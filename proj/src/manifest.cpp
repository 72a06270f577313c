#include "qf/manifest.hpp"

#include <json.hpp>

#include "qf/io_util.hpp"

namespace qf {

void RunManifest::add_input(const std::string& name, const std::filesystem::path& path) {
    inputs[name] = path.string();
    input_hashes[name] = to_hex64(fnv1a64(read_text_file(path)));
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["input_hashes"] = input_hashes;
    j["flags"] = flags;
    j["row_counts"] = row_counts;
    j["diagnostics"] = diagnostics;
    j["stats"] = stats;
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::filesystem::path& out_dir) {
    write_text_file(out_dir / "manifest.json", m.to_json());
}

}  // namespace qf
