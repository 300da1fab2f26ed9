#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "waveshape/grid.hpp"
#include "waveshape/mesh.hpp"

namespace waveshape::cli {

#ifndef WAVESHAPE_VERSION
#define WAVESHAPE_VERSION "0.0.0"
#endif

inline constexpr const char* kToolVersion = WAVESHAPE_VERSION;

/// Provenance record written as run.json into every output directory. It
/// holds no timestamps or host details, so identical runs write identical bytes.
class RunManifest {
public:
    RunManifest(std::string subcommand, std::vector<std::string> argv);
    void seed(std::uint64_t s) { record_["seed"] = s; }
    void model(const std::filesystem::path& path, const std::string& digest);
    /// Records the SHA-256 of an input file under its path as given.
    void input(const std::filesystem::path& path);
    void output(const std::string& name) { outputs_.push_back(name); }
    void set(const std::string& key, nlohmann::json value) { record_["parameters"][key] = std::move(value); }
    void write(const std::filesystem::path& dir) const;

private:
    nlohmann::json record_;
    std::vector<std::string> outputs_;
};

void ensure_directory(const std::filesystem::path& dir);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Meshes (*.obj) directly inside `dir`, sorted by file name.
std::vector<std::filesystem::path> list_meshes(const std::filesystem::path& dir);

/// TSDF of a shape file: a WSV1 volume is loaded as is, a .json scene or an
/// .obj mesh (normalized) is sampled on the n^3 TSDF grid.
Volume3 shape_tsdf(const std::filesystem::path& path, std::size_t n);

/// Extracts the zero level set of a TSDF-like volume.
TriangleMesh surface_of(const Volume3& v);

std::string numbered(const std::string& stem, std::size_t index, const std::string& ext);

}  // namespace waveshape::cli
