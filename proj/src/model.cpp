#include "waveshape/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "waveshape/digest.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/volume_io.hpp"

namespace waveshape {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr const char* kCorpusFormat = "waveshape-corpus-1";
constexpr const char* kModelFormat = "waveshape-model-1";

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + p.string() + " for writing");
    out << text;
    if (!out) throw ValidationError("failed writing " + p.string());
}

json parse_json(const std::string& text, const fs::path& p) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("malformed JSON in " + p.string() + ": " + e.what());
    }
}

template <class T>
T field(const json& j, const char* key, const fs::path& p) {
    if (!j.contains(key)) throw ValidationError(p.string() + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(p.string() + ": bad field '" + key + "': " + e.what());
    }
}

std::string file_name(const char* kind, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03zu.wsv", kind, k);
    return buf;
}
}  // namespace

json dims_json(const Dims& d) { return json::array({d.nx, d.ny, d.nz}); }
Dims dims_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ValidationError("dims must be [nx, ny, nz]");
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
}
json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ValidationError("vector must be [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Volume3 quantize_f32(const Volume3& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(static_cast<float>(v[i]));
    return v.with_values(std::move(out));
}

std::string write_corpus(const fs::path& dir, const std::vector<CorpusEntry>& entries, const CorpusInfo& info,
                         const std::vector<LatentCode>& anchors) {
    if (entries.empty()) throw ValidationError("corpus needs at least one entry");
    if (!anchors.empty() && anchors.size() != entries.size()) throw ValidationError("anchor count differs from entries");
    fs::create_directories(dir);
    json j;
    j["format"] = kCorpusFormat;
    j["bank"] = info.bank;
    j["levels"] = info.level_dims.size() - 1;
    json table = json::array();
    for (const auto& d : info.level_dims) table.push_back(dims_json(d));
    j["level_dims"] = table;
    j["source_origin"] = vec_json(info.source_origin);
    j["source_spacing"] = vec_json(info.source_spacing);
    j["tau"] = info.tau;
    json comps = json::array();
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        const std::string coarse = file_name("coarse", k);
        const std::string detail = file_name("detail", k);
        save_volume(dir / coarse, e.coarse);
        save_volume(dir / detail, e.detail);
        json c;
        c["name"] = e.name;
        c["weight"] = e.weight;
        c["coarse"] = coarse;
        c["detail"] = detail;
        c["coarse_sha256"] = sha256_file(dir / coarse);
        c["detail_sha256"] = sha256_file(dir / detail);
        if (!anchors.empty()) c["anchor"] = anchors[k].values;
        comps.push_back(c);
    }
    j["components"] = comps;
    const std::string text = j.dump(2) + "\n";
    write_text(dir / "corpus.json", text);
    return sha256_hex(text);
}

Corpus load_corpus(const fs::path& dir) {
    const fs::path manifest = dir / "corpus.json";
    const std::string text = read_text(manifest);
    const json j = parse_json(text, manifest);
    if (field<std::string>(j, "format", manifest) != kCorpusFormat) {
        throw ValidationError(manifest.string() + ": unsupported corpus format");
    }
    Corpus c;
    c.digest = sha256_hex(text);
    c.info.bank = field<std::string>(j, "bank", manifest);
    bank_by_name(c.info.bank);
    for (const auto& d : field<json>(j, "level_dims", manifest)) c.info.level_dims.push_back(dims_from_json(d));
    const int levels = field<int>(j, "levels", manifest);
    if (levels < 1 || c.info.level_dims.size() != static_cast<std::size_t>(levels) + 1 ||
        level_dims_for(c.info.level_dims[0], levels) != c.info.level_dims) {
        throw ValidationError(manifest.string() + ": inconsistent level table");
    }
    c.info.source_origin = vec_from_json(field<json>(j, "source_origin", manifest));
    c.info.source_spacing = vec_from_json(field<json>(j, "source_spacing", manifest));
    c.info.tau = field<double>(j, "tau", manifest);
    for (const auto& comp : field<json>(j, "components", manifest)) {
        CorpusEntry e;
        e.name = field<std::string>(comp, "name", manifest);
        e.weight = field<double>(comp, "weight", manifest);
        for (const char* kind : {"coarse", "detail"}) {
            const fs::path p = dir / field<std::string>(comp, kind, manifest);
            const std::string expect = field<std::string>(comp, (std::string(kind) + "_sha256").c_str(), manifest);
            if (sha256_file(p) != expect) throw ValidationError("digest mismatch for " + p.string());
            (std::string(kind) == "coarse" ? e.coarse : e.detail) = load_volume(p);
        }
        require_same_dims(e.coarse.dims(), c.info.level_dims.back(), "corpus coarse volume");
        require_same_dims(e.detail.dims(), c.info.level_dims[levels - 1], "corpus detail volume");
        if (comp.contains("anchor")) c.anchors.emplace_back(comp.at("anchor").get<std::vector<double>>());
        c.entries.push_back(std::move(e));
    }
    if (c.entries.empty()) throw ValidationError(manifest.string() + ": no components");
    if (!c.anchors.empty() && c.anchors.size() != c.entries.size()) {
        throw ValidationError(manifest.string() + ": anchors must be given for all components or none");
    }
    return c;
}

json to_json(const ModelManifest& m) {
    json j;
    j["format"] = kModelFormat;
    j["encoder"] = {{"kind", m.encoder_kind}, {"seed", m.encoder_seed}, {"pool", m.encoder_pool}};
    j["latent_length"] = m.latent_length;
    j["corpus"] = m.corpus;
    j["corpus_digest"] = m.corpus_digest;
    j["tau"] = m.tau;
    j["schedule"] = {{"steps", m.steps}, {"beta_start", m.beta_start}, {"beta_end", m.beta_end}};
    return j;
}

ModelManifest manifest_from_json(const json& j) {
    const fs::path where("model manifest");
    if (field<std::string>(j, "format", where) != kModelFormat) throw ValidationError("unsupported model format");
    ModelManifest m;
    const json enc = field<json>(j, "encoder", where);
    m.encoder_kind = field<std::string>(enc, "kind", where);
    if (m.encoder_kind != "pool_project") throw ValidationError("unknown encoder kind '" + m.encoder_kind + "'");
    m.encoder_seed = field<std::uint64_t>(enc, "seed", where);
    m.encoder_pool = field<std::size_t>(enc, "pool", where);
    m.latent_length = field<std::size_t>(j, "latent_length", where);
    m.corpus = field<std::string>(j, "corpus", where);
    m.corpus_digest = field<std::string>(j, "corpus_digest", where);
    m.tau = field<double>(j, "tau", where);
    const json s = field<json>(j, "schedule", where);
    m.steps = field<int>(s, "steps", where);
    m.beta_start = field<double>(s, "beta_start", where);
    m.beta_end = field<double>(s, "beta_end", where);
    return m;
}

Volume3 Model::coarse_frame() const {
    const auto& info = corpus.info;
    const double scale = std::ldexp(1.0, static_cast<int>(info.level_dims.size()) - 1);
    return Volume3(info.level_dims.back(), info.source_origin, info.source_spacing * scale);
}

Volume3 Model::decode(const Volume3& coarse) const {
    const auto& info = corpus.info;
    Volume3 out = reconstruct_truncated(coarse, details->predict(coarse), info.level_dims, bank_by_name(info.bank));
    return Volume3(out.dims(), info.source_origin, info.source_spacing,
                   std::vector<double>(out.values().begin(), out.values().end()));
}

Model load_model(const fs::path& manifest_path) {
    const std::string text = read_text(manifest_path);
    Model m{manifest_path, manifest_from_json(parse_json(text, manifest_path)), sha256_hex(text), {},
            make_linear_schedule(), nullptr, nullptr, nullptr};
    const auto& mf = m.manifest;
    m.schedule = make_linear_schedule(mf.steps, mf.beta_start, mf.beta_end);
    m.corpus = load_corpus(manifest_path.parent_path() / mf.corpus);
    if (m.corpus.digest != mf.corpus_digest) {
        throw ValidationError("corpus digest " + m.corpus.digest + " does not match the model manifest");
    }
    m.encoder = std::make_shared<PoolProjectEncoder>(mf.latent_length, mf.encoder_seed, mf.encoder_pool);
    std::vector<double> weights;
    std::vector<Volume3> coarse, detail;
    std::vector<LatentCode> anchors;
    for (std::size_t k = 0; k < m.corpus.entries.size(); ++k) {
        const auto& e = m.corpus.entries[k];
        weights.push_back(e.weight);
        coarse.push_back(e.coarse);
        detail.push_back(e.detail);
        LatentCode a = m.encoder->encode(e.coarse);
        if (!m.corpus.anchors.empty()) {
            const auto& stored = m.corpus.anchors[k];
            if (stored.size() != a.size() || std::sqrt(squared_distance(stored, a)) > 1e-9 * (1.0 + std::sqrt(squared_distance(a, LatentCode(a.size()))))) {
                throw ValidationError("stored anchor " + std::to_string(k) + " does not match the encoder");
            }
        }
        anchors.push_back(std::move(a));
    }
    m.oracle = std::make_shared<GaussianMixtureOracle>(weights, coarse, m.schedule, anchors, mf.tau);
    m.details = std::make_shared<NearestDetailPredictor>(coarse, detail);
    return m;
}

}  // namespace waveshape
