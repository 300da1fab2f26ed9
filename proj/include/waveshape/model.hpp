#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "waveshape/conditioning.hpp"
#include "waveshape/oracle.hpp"
#include "waveshape/pyramid.hpp"

namespace waveshape {

/// One training shape of an oracle corpus: its level-J coarse volume and
/// the matching top detail D^J.
struct CorpusEntry {
    std::string name;
    double weight = 1.0;
    Volume3 coarse;
    Volume3 detail;
};

struct CorpusInfo {
    std::string bank = "bior6.8";
    std::vector<Dims> level_dims;  // [C^0 .. C^J] of the source TSDF grid
    Vec3 source_origin{};
    Vec3 source_spacing{1.0, 1.0, 1.0};
    double tau = 1.0;
};

/// Rounds every value to the nearest 32-bit float, as the on-disk container does.
Volume3 quantize_f32(const Volume3& v);

/// Writes `dir`/corpus.json plus one coarse and one detail WSV1 file per
/// entry. Volumes are stored as 32-bit floats; anchors (one per entry, may be
/// empty) are recorded in the manifest. Returns the manifest digest.
std::string write_corpus(const std::filesystem::path& dir, const std::vector<CorpusEntry>& entries,
                         const CorpusInfo& info, const std::vector<LatentCode>& anchors);

struct Corpus {
    CorpusInfo info;
    std::vector<CorpusEntry> entries;
    std::vector<LatentCode> anchors;
    std::string digest;  // SHA-256 of corpus.json
};
/// Loads and checks file digests, dims, and level tables.
Corpus load_corpus(const std::filesystem::path& dir);

struct ModelManifest {
    std::string encoder_kind = "pool_project";
    std::uint64_t encoder_seed = 0;
    std::size_t encoder_pool = 8;
    std::size_t latent_length = kDefaultLatentLength;
    std::string corpus = "corpus";  // relative to the manifest directory
    std::string corpus_digest;
    double tau = 1.0;
    int steps = kDefaultSteps;
    double beta_start = kDefaultBetaStart;
    double beta_end = kDefaultBetaEnd;
};

nlohmann::json to_json(const ModelManifest& m);
ModelManifest manifest_from_json(const nlohmann::json& j);

/// Everything needed to generate, invert and decode with an oracle corpus.
struct Model {
    std::filesystem::path manifest_path;
    ModelManifest manifest;
    std::string digest;  // SHA-256 of the manifest file
    Corpus corpus;
    NoiseSchedule schedule;
    std::shared_ptr<PoolProjectEncoder> encoder;
    std::shared_ptr<GaussianMixtureOracle> oracle;
    std::shared_ptr<NearestDetailPredictor> details;

    /// Empty coarse volume in the corpus frame.
    Volume3 coarse_frame() const;
    /// Predicted detail plus truncated reconstruction to the TSDF grid.
    Volume3 decode(const Volume3& coarse) const;
};

/// Loads the manifest, verifies the corpus digest and anchor consistency.
Model load_model(const std::filesystem::path& manifest_path);

nlohmann::json dims_json(const Dims& d);
Dims dims_from_json(const nlohmann::json& j);
nlohmann::json vec_json(const Vec3& v);
Vec3 vec_from_json(const nlohmann::json& j);

}  // namespace waveshape
