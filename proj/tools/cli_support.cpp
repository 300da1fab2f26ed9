#include "cli_support.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "waveshape/digest.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/marching_cubes.hpp"
#include "waveshape/sdf.hpp"
#include "waveshape/tsdf.hpp"
#include "waveshape/volume_io.hpp"

namespace waveshape::cli {

namespace fs = std::filesystem;
using nlohmann::json;

RunManifest::RunManifest(std::string subcommand, std::vector<std::string> argv) {
    record_["tool"] = "waveshape";
    record_["version"] = kToolVersion;
    record_["subcommand"] = std::move(subcommand);
    record_["command_line"] = std::move(argv);
    record_["seed"] = nullptr;
    record_["model"] = nullptr;
    record_["inputs"] = json::object();
    record_["parameters"] = json::object();
}

void RunManifest::model(const fs::path& path, const std::string& digest) {
    record_["model"] = {{"path", path.string()}, {"sha256", digest}};
}

void RunManifest::input(const fs::path& path) { record_["inputs"][path.string()] = sha256_file(path); }

void RunManifest::write(const fs::path& dir) const {
    json out = record_;
    std::vector<std::string> names = outputs_;
    std::sort(names.begin(), names.end());
    json files = json::object();
    for (const auto& n : names) files[n] = sha256_file(dir / n);
    out["outputs"] = files;
    write_json(dir / "run.json", out);
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ValidationError("cannot create output directory " + dir.string());
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

std::vector<fs::path> list_meshes(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".obj") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    if (out.empty()) throw ValidationError("no .obj files in " + dir.string());
    return out;
}

Volume3 shape_tsdf(const fs::path& path, std::size_t n) {
    const std::string ext = path.extension().string();
    if (ext == ".wsv") {
        Volume3 v = load_volume(path);
        require_same_dims(v.dims(), cube_dims(n), "input TSDF");
        return v;
    }
    if (ext == ".json") return sample_tsdf(load_scene(path), n);
    if (ext == ".obj") return sample_tsdf(SdfSource::from_mesh(normalize_mesh(load_obj(path))), n);
    throw ValidationError("unsupported shape file " + path.string() + " (expected .wsv, .json or .obj)");
}

TriangleMesh surface_of(const Volume3& v) { return marching_cubes(v, 0.0); }

std::string numbered(const std::string& stem, std::size_t index, const std::string& ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu%s", stem.c_str(), index, ext.c_str());
    return buf;
}

}  // namespace waveshape::cli
