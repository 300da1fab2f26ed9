#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <json.hpp>

#include "waveshape/grid.hpp"
#include "waveshape/pyramid.hpp"
#include "waveshape/volume_io.hpp"

using namespace waveshape;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kScenes = WAVESHAPE_SCENES;

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + WAVESHAPE_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

json read(const fs::path& p) { return json::parse(slurp(p)); }

// Scratch directory shared by the suite, plus a small model built once.
struct Workspace {
    fs::path root;
    fs::path model;
    Workspace() {
        root = fs::temp_directory_path() / ("waveshape_cli_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
        std::string inputs;
        for (const char* s : {"sphere", "torus", "capsule", "box_with_holes"}) inputs += " " + q(kScenes / (std::string(s) + ".json"));
        const int rc = run("build-model --input" + inputs + " --res 32 --levels 2 --latent-length 64 --pool 4 --out " +
                           q(root / "model"));
        REQUIRE(rc == 0);
        model = root / "model" / "model.json";
    }
    ~Workspace() { fs::remove_all(root); }
};

Workspace& ws() {
    static Workspace w;
    return w;
}

bool same_tree(const fs::path& a, const fs::path& b) {
    std::size_t count = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const fs::path other = b / fs::relative(e.path(), a);
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
        ++count;
    }
    std::size_t count_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
    return count > 0 && count == count_b;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("prepare writes the volume set and a compactness report") {
    const fs::path out = ws().root / "prep";
    REQUIRE(run("prepare --scene " + q(kScenes / "sphere.json") + " --res 32 --levels 2 --out " + q(out)) == 0);
    for (const char* f : {"tsdf.wsv", "pyramid.wsp", "truncated.wsv", "surface.obj", "compactness.json", "run.json"}) {
        CHECK(fs::exists(out / f));
    }
    const json c = read(out / "compactness.json");
    CHECK(c.at("levels") == 2);
    const json r = read(out / "run.json");
    CHECK(r.at("subcommand") == "prepare");
    CHECK(r.at("outputs").contains("tsdf.wsv"));
    CHECK(r.at("inputs").size() == 1);
}

TEST_CASE("decompose then reconstruct returns the input") {
    const fs::path prep = ws().root / "prep_box";
    REQUIRE(run("prepare --scene " + q(kScenes / "box_with_holes.json") + " --res 32 --levels 2 --out " + q(prep)) == 0);
    REQUIRE(run("decompose --input " + q(prep / "tsdf.wsv") + " --levels 3 --out " + q(ws().root / "dec")) == 0);
    REQUIRE(run("reconstruct --input " + q(ws().root / "dec" / "pyramid.wsp") + " --out " + q(ws().root / "rec")) == 0);
    const Volume3 a = load_volume(prep / "tsdf.wsv");
    const Volume3 b = load_volume(ws().root / "rec" / "volume.wsv");
    CHECK(max_abs_diff(a, b) <= 1e-6);
    REQUIRE(run("reconstruct-truncated --input " + q(ws().root / "dec" / "pyramid.wsp") + " --source " +
                q(prep / "tsdf.wsv") + " --out " + q(ws().root / "trunc")) == 0);
    CHECK(fs::exists(ws().root / "trunc" / "compactness.json"));
}

TEST_CASE("generate is byte-identical for a fixed seed") {
    const fs::path out = ws().root / "gen";
    const std::string cmd = "generate --model " + q(ws().model) + " --seed 7 --count 3 --out " + q(out);
    REQUIRE(run(cmd) == 0);
    fs::rename(out, ws().root / "gen_first");
    REQUIRE(run(cmd) == 0);
    CHECK(same_tree(out, ws().root / "gen_first"));
    CHECK(fs::exists(out / "shape_000.obj"));
    CHECK(fs::exists(out / "shape_002.wsv"));
    REQUIRE(run("generate --model " + q(ws().model) + " --seed 8 --count 3 --out " + q(ws().root / "gen8")) == 0);
    // Samples collapse onto training modes, so only the recorded seed must differ.
    CHECK(read(ws().root / "gen8" / "run.json").at("seed") == 8);
    REQUIRE(run("generate --model " + q(ws().model) + " --seed 7 --count 2 --ddim-steps 50 --out " +
                q(ws().root / "gen_ddim")) == 0);
}

TEST_CASE("eval of a set against itself") {
    const fs::path dir = ws().root / "eval_set";
    fs::create_directories(dir);
    int i = 0;
    for (const char* s : {"sphere", "torus", "table"}) {
        const fs::path p = ws().root / ("eval_" + std::string(s));
        REQUIRE(run("prepare --scene " + q(kScenes / (std::string(s) + ".json")) + " --res 32 --levels 1 --out " + q(p)) == 0);
        fs::copy_file(p / "surface.obj", dir / ("m" + std::to_string(i++) + ".obj"));
    }
    REQUIRE(run("eval --generated " + q(dir) + " --reference " + q(dir) + " --points 256 --out " + q(ws().root / "eval")) == 0);
    const json m = read(ws().root / "eval" / "metrics.json").at("metrics");
    for (const char* metric : {"chamfer", "emd"}) {
        CHECK(m.at(metric).at("coverage").get<double>() == 1.0);
        CHECK(m.at(metric).at("mmd").get<double>() == 0.0);
        CHECK(m.at(metric).at("one_nna").get<double>() == 0.0);
    }
    REQUIRE(run("novelty --generated " + q(dir) + " --train " + q(dir) + " --k 2 --points 256 --out " +
                q(ws().root / "novelty")) == 0);
    const json n = read(ws().root / "novelty" / "novelty.json");
    CHECK(n.at("queries").size() == 3);
}

TEST_CASE("invert, interpolate and manipulate run end to end") {
    const fs::path inv = ws().root / "inv";
    REQUIRE(run("invert --input " + q(kScenes / "torus.json") + " --model " + q(ws().model) + " --iterations 50 --out " + q(inv)) == 0);
    const json r = read(inv / "report.json");
    CHECK(r.at("l2_to_input").get<double>() < 1e-3);
    CHECK(fs::exists(inv / "loss_trace.csv"));

    const fs::path inv2 = ws().root / "inv2";
    REQUIRE(run("invert --input " + q(kScenes / "sphere.json") + " --model " + q(ws().model) + " --no-refine --out " + q(inv2)) == 0);
    REQUIRE(run("interpolate --za " + q(inv / "latent.txt") + " --zb " + q(inv2 / "latent.txt") + " --model " +
                q(ws().model) + " --steps 3 --ddim-steps 20 --out " + q(ws().root / "interp")) == 0);
    CHECK(fs::exists(ws().root / "interp" / "frame_002.obj"));

    json plan;
    plan["model"] = fs::relative(ws().model, ws().root).string();
    plan["mode"] = "replacement";
    plan["za"] = "inv/latent.txt";
    plan["zb"] = "inv2/latent.txt";
    plan["region"] = {{"lo", {-1, 0, -1}}, {"hi", {1, 1, 1}}};
    plan["seed"] = 3;
    std::ofstream(ws().root / "plan.json") << plan.dump(2);
    REQUIRE(run("manipulate --plan " + q(ws().root / "plan.json") + " --out " + q(ws().root / "manip")) == 0);
    const json m = read(ws().root / "manip" / "report.json");
    CHECK(m.contains("boundary_discontinuity"));
    CHECK(fs::exists(ws().root / "manip" / "result.obj"));
}

TEST_CASE("schedule table") {
    REQUIRE(run("schedule --steps 1000 --out " + q(ws().root / "sched")) == 0);
    std::istringstream is(slurp(ws().root / "sched" / "schedule.csv"));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows >= 1000);
}

TEST_CASE("invalid inputs exit with status 2") {
    std::ofstream(ws().root / "bad.wsv", std::ios::binary) << "XXXX0000000000000000000000000000000000000000000000000000";
    CHECK(run("decompose --input " + q(ws().root / "bad.wsv") + " --out " + q(ws().root / "bad_out")) == 2);
    CHECK(run("generate --out " + q(ws().root / "x")) == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("prepare --scene " + q(kScenes / "sphere.json") + " --bank db4 --out " + q(ws().root / "bad_bank")) == 2);

    // A corpus file changed after the model was built.
    const fs::path copy = ws().root / "tampered";
    fs::copy(ws().model.parent_path(), copy, fs::copy_options::recursive);
    {
        std::fstream f(copy / "corpus" / "coarse_000.wsv", std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(-1, std::ios::end);
        f.put('\x7f');
    }
    CHECK(run("generate --model " + q(copy / "model.json") + " --out " + q(ws().root / "t_out")) == 2);

    // A manifest pointing at a different corpus digest.
    fs::remove_all(copy);
    fs::copy(ws().model.parent_path(), copy, fs::copy_options::recursive);
    json m = read(copy / "model.json");
    m["corpus_digest"] = std::string(64, '0');
    std::ofstream(copy / "model.json") << m.dump(2);
    CHECK(run("generate --model " + q(copy / "model.json") + " --out " + q(ws().root / "t_out")) == 2);
}

}  // TEST_SUITE
