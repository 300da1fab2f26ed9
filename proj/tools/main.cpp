#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "waveshape/conditioning.hpp"
#include "waveshape/diffusion.hpp"
#include "waveshape/emd.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/lfd.hpp"
#include "waveshape/manipulation.hpp"
#include "waveshape/model.hpp"
#include "waveshape/parallel.hpp"
#include "waveshape/point_metrics.hpp"
#include "waveshape/pyramid.hpp"
#include "waveshape/sdf.hpp"
#include "waveshape/set_metrics.hpp"
#include "waveshape/tsdf.hpp"
#include "waveshape/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace waveshape;
using namespace waveshape::cli;

namespace {

std::vector<std::string> g_argv;

json report_json(const CompactnessReport& r) {
    return {{"source_count", r.source_count},
            {"retained_count", r.retained_count},
            {"retained_fraction", r.retained_fraction},
            {"coarse_energy", r.coarse_energy},
            {"detail_energy", r.detail_energy},
            {"mean_abs_source", r.mean_abs_source},
            {"mean_abs_change", r.mean_abs_change},
            {"relative_change", r.relative_change},
            {"max_abs_change", r.max_abs_change}};
}

void print_report(const CompactnessReport& r) {
    std::printf("retained %zu of %zu coefficients (%.3f%%)\n", r.retained_count, r.source_count,
                100.0 * r.retained_fraction);
    std::printf("truncated reconstruction: mean |change| / mean |tsdf| = %.3f%%, max |change| = %.3g\n",
                100.0 * r.relative_change, r.max_abs_change);
}

std::optional<std::vector<int>> ddim_subset(int ddim_steps, const NoiseSchedule& s) {
    if (ddim_steps <= 0) return std::nullopt;
    return even_ddim_subset(s.steps(), ddim_steps);
}

void save_loss_trace(const fs::path& path, const std::vector<double>& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    const std::vector<double> smooth = moving_average(trace);
    out << "iteration,loss,smoothed\n";
    char buf[96];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, trace[i], smooth[i]);
        out << buf;
    }
}

/// Coarse coefficients of a shape in the model's frame. A WSV1 file at the
/// coarse dims is taken as is; anything else goes through the TSDF pyramid.
Volume3 coarse_input(const Model& m, const fs::path& path) {
    const auto& info = m.corpus.info;
    if (path.extension() == ".wsv") {
        Volume3 v = load_volume(path);
        if (v.dims() == info.level_dims.back()) return m.coarse_frame().with_values({v.values().begin(), v.values().end()});
        require_same_dims(v.dims(), info.level_dims.front(), "input volume");
        const int levels = static_cast<int>(info.level_dims.size()) - 1;
        return pyramid_decompose(v, levels, bank_by_name(info.bank)).coarse;
    }
    const Dims& d = info.level_dims.front();
    if (d.nx != d.ny || d.nx != d.nz) throw ValidationError("model TSDF grid is not cubic");
    const int levels = static_cast<int>(info.level_dims.size()) - 1;
    return pyramid_decompose(shape_tsdf(path, d.nx), levels, bank_by_name(info.bank)).coarse;
}

struct Decoded {
    Volume3 coarse;
    TriangleMesh mesh;
};

Decoded decode_shape(const Model& m, Volume3 coarse) {
    if (!coarse.all_finite()) throw NumericalError("sampled coefficients are not finite");
    TriangleMesh mesh = surface_of(m.decode(coarse));
    return {std::move(coarse), std::move(mesh)};
}

void write_shape(const fs::path& dir, const std::string& stem, const Decoded& d, RunManifest& run) {
    save_volume(dir / (stem + ".wsv"), d.coarse);
    save_obj(dir / (stem + ".obj"), d.mesh);
    run.output(stem + ".wsv");
    run.output(stem + ".obj");
}

// ---------------------------------------------------------------------------

struct PrepareArgs {
    std::string scene, obj, out, bank = "bior6.8";
    std::size_t res = 64;
    int levels = kDefaultLevels;
};

void run_prepare(const PrepareArgs& a) {
    const auto& bank = bank_by_name(a.bank);
    if (a.scene.empty() == a.obj.empty()) throw ValidationError("give exactly one of --scene or --obj");
    ensure_directory(a.out);
    const fs::path out(a.out);
    RunManifest run("prepare", g_argv);
    SdfSource source = a.scene.empty() ? SdfSource::from_mesh(normalize_mesh(load_obj(a.obj))) : load_scene(a.scene);
    run.input(a.scene.empty() ? a.obj : a.scene);
    TsdfStats stats;
    const Volume3 tsdf = sample_tsdf(source, a.res, &stats);
    const WaveletPyramid p = pyramid_decompose(tsdf, a.levels, bank);
    const Volume3 truncated = reconstruct_truncated(p);
    const CompactnessReport r = compactness_report(p, tsdf, truncated);

    save_volume(out / "tsdf.wsv", tsdf);
    save_pyramid(out / "pyramid.wsp", p);
    save_volume(out / "truncated.wsv", truncated);
    save_obj(out / "surface.obj", surface_of(tsdf));
    json rep = report_json(r);
    rep["bank"] = a.bank;
    rep["levels"] = a.levels;
    rep["resolution"] = a.res;
    rep["sign_uncertain_voxels"] = stats.sign_uncertain;
    write_json(out / "compactness.json", rep);
    for (const char* f : {"tsdf.wsv", "pyramid.wsp", "truncated.wsv", "surface.obj", "compactness.json"}) run.output(f);
    run.set("res", a.res);
    run.set("levels", a.levels);
    run.set("bank", a.bank);
    run.write(out);
    print_report(r);
    if (stats.sign_uncertain) std::printf("warning: %zu voxels with unresolved inside/outside votes\n", stats.sign_uncertain);
}

struct DecomposeArgs {
    std::string input, out, bank = "bior6.8";
    int levels = kDefaultLevels;
};

void run_decompose(const DecomposeArgs& a) {
    ensure_directory(a.out);
    RunManifest run("decompose", g_argv);
    run.input(a.input);
    const WaveletPyramid p = pyramid_decompose(load_volume(a.input), a.levels, bank_by_name(a.bank));
    save_pyramid(fs::path(a.out) / "pyramid.wsp", p);
    run.output("pyramid.wsp");
    run.set("levels", a.levels);
    run.set("bank", a.bank);
    run.write(a.out);
}

struct ReconstructArgs {
    std::string input, source, out;
};

void run_reconstruct(const ReconstructArgs& a) {
    ensure_directory(a.out);
    RunManifest run("reconstruct", g_argv);
    run.input(a.input);
    save_volume(fs::path(a.out) / "volume.wsv", pyramid_reconstruct(load_pyramid(a.input)));
    run.output("volume.wsv");
    run.write(a.out);
}

void run_reconstruct_truncated(const ReconstructArgs& a) {
    ensure_directory(a.out);
    const fs::path out(a.out);
    RunManifest run("reconstruct-truncated", g_argv);
    run.input(a.input);
    const WaveletPyramid p = load_pyramid(a.input);
    const Volume3 truncated = reconstruct_truncated(p);
    save_volume(out / "truncated.wsv", truncated);
    run.output("truncated.wsv");
    if (!a.source.empty()) {
        run.input(a.source);
        const Volume3 source = load_volume(a.source);
        const CompactnessReport r = compactness_report(p, source, truncated);
        write_json(out / "compactness.json", report_json(r));
        run.output("compactness.json");
        print_report(r);
    }
    run.write(out);
}

struct BuildArgs {
    std::vector<std::string> inputs;
    std::vector<double> weights;
    std::string out, bank = "bior6.8";
    std::size_t res = 64, latent_length = kDefaultLatentLength, pool = 8;
    int levels = 2, steps = kDefaultSteps;
    double tau = 0.05, beta_start = kDefaultBetaStart, beta_end = kDefaultBetaEnd;
    std::uint64_t encoder_seed = 0;
};

void run_build_model(const BuildArgs& a) {
    if (a.inputs.empty()) throw ValidationError("build-model needs at least one --input");
    if (!a.weights.empty() && a.weights.size() != a.inputs.size()) throw ValidationError("one weight per input");
    if (!(a.tau > 0.0)) throw ValidationError("tau must be positive");
    const auto& bank = bank_by_name(a.bank);
    ensure_directory(a.out);
    const fs::path out(a.out);
    RunManifest run("build-model", g_argv);
    const PoolProjectEncoder encoder(a.latent_length, a.encoder_seed, a.pool);

    std::vector<CorpusEntry> entries(a.inputs.size());
    std::vector<LatentCode> anchors(a.inputs.size());
    CorpusInfo info;
    info.bank = a.bank;
    info.tau = a.tau;
    for (std::size_t k = 0; k < a.inputs.size(); ++k) {
        run.input(a.inputs[k]);
        const Volume3 tsdf = shape_tsdf(a.inputs[k], a.res);
        const WaveletPyramid p = pyramid_decompose(tsdf, a.levels, bank);
        if (k == 0) {
            info.level_dims = p.level_dims;
            info.source_origin = tsdf.origin();
            info.source_spacing = tsdf.spacing();
        } else {
            require_same_dims(tsdf.dims(), info.level_dims.front(), "corpus shape");
        }
        auto& e = entries[k];
        e.name = fs::path(a.inputs[k]).stem().string();
        e.weight = a.weights.empty() ? 1.0 : a.weights[k];
        e.coarse = quantize_f32(p.coarse);
        e.detail = quantize_f32(p.details.front());
        anchors[k] = encoder.encode(e.coarse);
    }
    const std::string corpus_digest = write_corpus(out / "corpus", entries, info, anchors);

    ModelManifest m;
    m.encoder_seed = a.encoder_seed;
    m.encoder_pool = a.pool;
    m.latent_length = a.latent_length;
    m.corpus = "corpus";
    m.corpus_digest = corpus_digest;
    m.tau = a.tau;
    m.steps = a.steps;
    m.beta_start = a.beta_start;
    m.beta_end = a.beta_end;
    write_json(out / "model.json", to_json(m));
    load_model(out / "model.json");  // round-trip check
    run.output("model.json");
    run.output("corpus/corpus.json");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        run.output("corpus/" + numbered("coarse", k, ".wsv"));
        run.output("corpus/" + numbered("detail", k, ".wsv"));
    }
    run.write(out);
    std::printf("model with %zu shapes, coarse grid %s\n", entries.size(), to_string(info.level_dims.back()).c_str());
}

struct GenerateArgs {
    std::string model, latent, out;
    std::uint64_t seed = 0;
    std::size_t count = 1;
    int ddim_steps = 0;
};

void run_generate(const GenerateArgs& a) {
    if (a.count == 0) throw ValidationError("--count must be positive");
    const Model m = load_model(a.model);
    ensure_directory(a.out);
    RunManifest run("generate", g_argv);
    run.seed(a.seed);
    run.model(a.model, m.digest);
    std::optional<LatentCode> z;
    if (!a.latent.empty()) {
        run.input(a.latent);
        z = load_latent(a.latent);
        if (z->size() != m.manifest.latent_length) throw ValidationError("latent length does not match the model");
    }
    const GaussianStreams noise(a.seed);
    const auto subset = ddim_subset(a.ddim_steps, m.schedule);
    const Volume3 frame = m.coarse_frame();
    std::vector<Decoded> shapes(a.count);
    parallel_for(a.count, [&](std::size_t i) {
        SampleOptions o;
        o.z = z ? &*z : nullptr;
        o.subset = subset;
        o.chain = i;
        shapes[i] = decode_shape(m, sample(*m.oracle, m.schedule, frame, noise, o));
    });
    for (std::size_t i = 0; i < a.count; ++i) write_shape(a.out, numbered("shape", i, ""), shapes[i], run);
    run.set("count", a.count);
    run.set("ddim_steps", a.ddim_steps);
    run.write(a.out);
    std::printf("generated %zu shapes\n", a.count);
}

struct InvertArgs {
    std::string input, model, out;
    bool no_refine = false;
    std::uint64_t seed = 0;
    int iterations = 400, ddim_steps = 0;
    double learning_rate = 5e-2;
};

void run_invert(const InvertArgs& a) {
    const Model m = load_model(a.model);
    ensure_directory(a.out);
    const fs::path out(a.out);
    RunManifest run("invert", g_argv);
    run.seed(a.seed);
    run.model(a.model, m.digest);
    run.input(a.input);
    const Volume3 c0 = coarse_input(m, a.input);
    const GaussianStreams noise(a.seed);
    InvertOptions o;
    o.refine = !a.no_refine;
    o.refine_options.iterations = a.iterations;
    o.refine_options.learning_rate = a.learning_rate;
    if (a.ddim_steps > 0) o.subset = even_ddim_subset(m.schedule.steps(), a.ddim_steps);
    const InvertResult r = invert(c0, *m.encoder, *m.oracle, m.schedule, noise, o);

    save_latent(out / "latent.txt", r.z);
    save_latent(out / "encoded.txt", r.encoded);
    save_loss_trace(out / "loss_trace.csv", r.loss_trace);
    const Decoded d = decode_shape(m, r.volume);
    write_shape(out, "reconstruction", d, run);
    json rep{{"l2_to_input", l2_distance(r.volume, c0)}, {"refined", o.refine}, {"iterations", r.loss_trace.size()}};
    if (!r.loss_trace.empty()) {
        const TraceQuarters q = trace_quarters(r.loss_trace);
        rep["smoothed_loss_first_quarter"] = q.first;
        rep["smoothed_loss_final"] = q.last;
    }
    write_json(out / "report.json", rep);
    for (const char* f : {"latent.txt", "encoded.txt", "loss_trace.csv", "report.json"}) run.output(f);
    run.set("refine", o.refine);
    run.set("iterations", a.iterations);
    run.set("learning_rate", a.learning_rate);
    run.set("ddim_steps", a.ddim_steps);
    run.write(out);
    std::printf("inversion L2 to input: %.6g\n", rep["l2_to_input"].get<double>());
}

struct InterpolateArgs {
    std::string za, zb, model, out;
    std::size_t steps = 5;
    std::uint64_t seed = 0;
    int ddim_steps = 0;
};

void run_interpolate(const InterpolateArgs& a) {
    if (a.steps < 2) throw ValidationError("--steps must be at least 2");
    const Model m = load_model(a.model);
    ensure_directory(a.out);
    RunManifest run("interpolate", g_argv);
    run.seed(a.seed);
    run.model(a.model, m.digest);
    run.input(a.za);
    run.input(a.zb);
    const LatentCode za = load_latent(a.za);
    const LatentCode zb = load_latent(a.zb);
    if (za.size() != m.manifest.latent_length || zb.size() != m.manifest.latent_length) {
        throw ValidationError("latent length does not match the model");
    }
    const GaussianStreams noise(a.seed);
    const auto subset = ddim_subset(a.ddim_steps, m.schedule);
    const Volume3 frame = m.coarse_frame();
    std::vector<Decoded> frames(a.steps);
    parallel_for(a.steps, [&](std::size_t k) {
        const LatentCode z = interpolate_latent(za, zb, static_cast<double>(k) / static_cast<double>(a.steps - 1));
        SampleOptions o;
        o.z = &z;
        o.subset = subset;
        frames[k] = decode_shape(m, sample(*m.oracle, m.schedule, frame, noise, o));
    });
    for (std::size_t k = 0; k < a.steps; ++k) write_shape(a.out, numbered("frame", k, ""), frames[k], run);
    run.set("steps", a.steps);
    run.set("ddim_steps", a.ddim_steps);
    run.write(a.out);
}

/// Plan paths are resolved relative to the plan file.
fs::path plan_path(const fs::path& plan, const json& j, const char* key) {
    const fs::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : plan.parent_path() / p;
}

RegionMask3 region_mask(const json& region, const Volume3& frame) {
    const Vec3 lo = vec_from_json(region.at("lo"));
    const Vec3 hi = vec_from_json(region.at("hi"));
    RegionMask3 mask(frame.dims());
    const Dims& d = frame.dims();
    for (std::size_t k = 0; k < d.nz; ++k) {
        for (std::size_t j = 0; j < d.ny; ++j) {
            for (std::size_t i = 0; i < d.nx; ++i) {
                const Vec3 p = frame.position(i, j, k);
                const bool in = p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
                mask.set(i, j, k, in);
            }
        }
    }
    return mask;
}

void run_manipulate(const std::string& plan_file, const std::string& out_dir) {
    const fs::path plan_p(plan_file);
    const json j = read_json(plan_p);
    RunManifest run("manipulate", g_argv);
    run.input(plan_p);
    try {
        const fs::path model_p = plan_path(plan_p, j, "model");
        const Model m = load_model(model_p);
        run.model(model_p, m.digest);
        const std::uint64_t seed = j.value("seed", std::uint64_t{0});
        run.seed(seed);

        ManipulationPlan plan;
        plan.mode = parse_mode(j.at("mode").get<std::string>());
        plan.delta_t = j.value("delta_t", 10);
        plan.harmonize_repeats = j.value("repeats", 10);
        if (j.contains("alpha")) {
            plan.alpha = j["alpha"].is_array() ? j["alpha"].get<std::vector<double>>()
                                               : std::vector<double>{j["alpha"].get<double>()};
        }
        const auto& info = m.corpus.info;
        const int levels = static_cast<int>(info.level_dims.size()) - 1;
        const Volume3 frame = m.coarse_frame();
        if (j.contains("mask")) {
            const fs::path mp = plan_path(plan_p, j, "mask");
            run.input(mp);
            const RegionMask3 mask = load_mask(mp);
            if (mask.dims() == info.level_dims.back()) {
                plan.mask = mask;
            } else {
                require_same_dims(mask.dims(), info.level_dims.front(), "manipulation mask");
                plan.mask = mask_to_coefficient_domain(mask, levels, bank_by_name(info.bank));
            }
        } else if (j.contains("region")) {
            Volume3 fine(info.level_dims.front(), info.source_origin, info.source_spacing);
            plan.mask = mask_to_coefficient_domain(region_mask(j["region"], fine), levels, bank_by_name(info.bank));
        } else {
            plan.mask = RegionMask3(info.level_dims.back());
        }

        std::optional<LatentCode> za, zb;
        for (auto [key, slot] : {std::pair{"za", &za}, std::pair{"zb", &zb}}) {
            if (!j.contains(key)) continue;
            const fs::path p = plan_path(plan_p, j, key);
            run.input(p);
            *slot = load_latent(p);
            if ((*slot)->size() != m.manifest.latent_length) throw ValidationError("latent length does not match the model");
        }
        const LatentCode* pa = za ? &*za : nullptr;
        const LatentCode* pb = zb ? &*zb : nullptr;

        ensure_directory(out_dir);
        const fs::path out(out_dir);
        const GaussianStreams noise(seed);
        const Volume3 result = manipulate(*m.oracle, m.schedule, frame, pa, pb, plan, noise);
        SampleOptions oa, ob;
        oa.z = pa;
        ob.z = plan.mode == ManipulationMode::regeneration ? nullptr : pb;
        const Volume3 ca = sample(*m.oracle, m.schedule, frame, noise, oa);
        const Volume3 cb = sample(*m.oracle, m.schedule, frame, noise, ob);
        const Volume3 baseline = naive_mix_baseline(ca, cb, plan.mask);

        write_shape(out, "result", decode_shape(m, result), run);
        write_shape(out, "naive_mix", decode_shape(m, baseline), run);
        save_mask(out / "coarse_mask.wsv", plan.mask, &frame);
        run.output("coarse_mask.wsv");
        const double b_result = boundary_discontinuity(result, plan.mask);
        const double b_naive = boundary_discontinuity(baseline, plan.mask);
        write_json(out / "report.json", {{"mode", to_string(plan.mode)},
                                         {"mask_voxels", plan.mask.count()},
                                         {"boundary_discontinuity", {{"manipulated", b_result}, {"naive_mix", b_naive}}}});
        run.output("report.json");
        run.set("plan", j);
        run.write(out);
        std::printf("boundary discontinuity: manipulated %.6g, naive mix %.6g\n", b_result, b_naive);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad manipulation plan: ") + e.what());
    }
}

struct EvalArgs {
    std::string generated, reference, out, metric = "both";
    std::size_t points = kDefaultSurfacePoints;
    std::uint64_t seed = 0;
};

std::vector<TriangleMesh> load_meshes(const std::vector<fs::path>& paths) {
    std::vector<TriangleMesh> out;
    for (const auto& p : paths) out.push_back(load_obj(p));
    return out;
}

/// Surface samples of every mesh; all meshes use the same seed so identical
/// meshes give identical point sets.
std::vector<PointSet> point_sets(const std::vector<TriangleMesh>& meshes, std::size_t n, std::uint64_t seed) {
    std::vector<PointSet> out(meshes.size());
    parallel_for(meshes.size(), [&](std::size_t i) {
        if (meshes[i].empty()) throw ValidationError("cannot sample an empty mesh");
        out[i] = sample_surface(meshes[i], n, seed);
    });
    return out;
}

json names_json(const std::vector<fs::path>& paths) {
    json a = json::array();
    for (const auto& p : paths) a.push_back(p.filename().string());
    return a;
}

void run_eval(const EvalArgs& a) {
    if (a.metric != "chamfer" && a.metric != "emd" && a.metric != "both") {
        throw ValidationError("--metric must be chamfer, emd or both");
    }
    const auto gen_paths = list_meshes(a.generated);
    const auto ref_paths = list_meshes(a.reference);
    ensure_directory(a.out);
    RunManifest run("eval", g_argv);
    run.seed(a.seed);
    for (const auto& p : gen_paths) run.input(p);
    for (const auto& p : ref_paths) run.input(p);
    const auto gen = point_sets(load_meshes(gen_paths), a.points, a.seed);
    const auto ref = point_sets(load_meshes(ref_paths), a.points, a.seed);

    json rep;
    rep["conventions"] = {{"chamfer", "mean squared nearest-neighbour distance, summed over both directions"},
                          {"emd", "mean Euclidean distance under an optimal one-to-one matching"},
                          {"coverage", "fraction of reference shapes matched"},
                          {"one_nna", "fraction; ideal is 0.5"},
                          {"points_per_shape", a.points},
                          {"sampling_seed", a.seed}};
    rep["generated"] = names_json(gen_paths);
    rep["reference"] = names_json(ref_paths);
    std::vector<BaseMetric> metrics;
    if (a.metric != "emd") metrics.push_back(BaseMetric::chamfer);
    if (a.metric != "chamfer") metrics.push_back(BaseMetric::emd);
    for (BaseMetric bm : metrics) {
        const SetMetrics s = set_metrics(gen, ref, bm);
        rep["metrics"][to_string(bm)] = {{"coverage", s.coverage}, {"mmd", s.mmd}, {"one_nna", s.one_nna}};
        std::printf("%-8s COV %.2f%%  MMD %.6g  1-NNA %.2f%%\n", to_string(bm), 100.0 * s.coverage, s.mmd,
                    100.0 * s.one_nna);
    }
    write_json(fs::path(a.out) / "metrics.json", rep);
    run.output("metrics.json");
    run.set("metric", a.metric);
    run.set("points", a.points);
    run.write(a.out);
}

struct NoveltyArgs {
    std::string generated, train, out;
    std::size_t k = 4, points = kDefaultSurfacePoints;
    std::uint64_t seed = 0;
    int bins = 20;
};

double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void run_novelty(const NoveltyArgs& a) {
    if (a.k == 0 || a.bins < 1) throw ValidationError("--k and --bins must be positive");
    const auto gen_paths = list_meshes(a.generated);
    const auto train_paths = list_meshes(a.train);
    ensure_directory(a.out);
    RunManifest run("novelty", g_argv);
    run.seed(a.seed);
    for (const auto& p : gen_paths) run.input(p);
    for (const auto& p : train_paths) run.input(p);
    const auto gen = load_meshes(gen_paths);
    const auto train = load_meshes(train_paths);

    std::vector<std::vector<Descriptor>> gen_lf(gen.size()), train_lf(train.size());
    parallel_for(gen.size(), [&](std::size_t i) { gen_lf[i] = light_field(gen[i]); });
    parallel_for(train.size(), [&](std::size_t i) { train_lf[i] = light_field(train[i]); });
    const auto gen_pts = point_sets(gen, a.points, a.seed);
    const auto train_pts = point_sets(train, a.points, a.seed);
    const DistanceMatrix cd = pairwise(gen_pts, train_pts, chamfer);
    DistanceMatrix ld{gen.size(), train.size(), std::vector<double>(gen.size() * train.size())};
    parallel_for(gen.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < train.size(); ++j) ld.values[i * train.size() + j] = lfd_distance(gen_lf[i], train_lf[j]);
    });

    auto row = [](const DistanceMatrix& m, std::size_t r) {
        return std::vector<double>(m.values.begin() + static_cast<long>(r * m.cols),
                                   m.values.begin() + static_cast<long>((r + 1) * m.cols));
    };
    auto ranked_json = [&](const std::vector<Ranked>& r) {
        json a_ = json::array();
        for (const auto& x : r) a_.push_back({{"train", train_paths[x.index].filename().string()}, {"distance", x.distance}});
        return a_;
    };
    json queries = json::array();
    std::vector<double> nearest_lfd;
    for (std::size_t i = 0; i < gen.size(); ++i) {
        const auto by_lfd = rank_topk(row(ld, i), a.k);
        nearest_lfd.push_back(by_lfd.front().distance);
        queries.push_back({{"query", gen_paths[i].filename().string()},
                           {"top_k_chamfer", ranked_json(rank_topk(row(cd, i), a.k))},
                           {"top_k_lfd", ranked_json(by_lfd)}});
    }
    std::vector<double> sorted = nearest_lfd;
    std::sort(sorted.begin(), sorted.end());
    json pct = json::array();
    for (double q : {0.0, 10.0, 25.0, 50.0, 75.0, 90.0, 100.0}) {
        const double v = percentile(sorted, q);
        std::size_t closest = 0;
        for (std::size_t i = 1; i < nearest_lfd.size(); ++i) {
            if (std::abs(nearest_lfd[i] - v) < std::abs(nearest_lfd[closest] - v)) closest = i;
        }
        pct.push_back({{"percentile", q}, {"lfd", v}, {"example", gen_paths[closest].filename().string()}});
    }
    const double lo = sorted.front(), hi = sorted.back();
    const double width = hi > lo ? (hi - lo) / a.bins : 1.0;
    std::vector<std::size_t> counts(a.bins, 0);
    for (double v : sorted) counts[std::min<std::size_t>(a.bins - 1, static_cast<std::size_t>((v - lo) / width))]++;
    json hist = {{"lower", lo}, {"bin_width", width}, {"counts", counts}};

    json rep{{"k", a.k},
             {"conventions", {{"chamfer", "squared distances, summed over both directions"},
                              {"lfd", "sum over 20 matching views of L1 descriptor distances, no rotation search"},
                              {"points_per_shape", a.points},
                              {"sampling_seed", a.seed}}},
             {"queries", queries},
             {"nearest_lfd", nearest_lfd},
             {"percentiles", pct},
             {"histogram", hist}};
    write_json(fs::path(a.out) / "novelty.json", rep);
    run.output("novelty.json");
    run.set("k", a.k);
    run.set("bins", a.bins);
    run.write(a.out);
    std::printf("median nearest-training LFD: %.6g\n", percentile(sorted, 50.0));
}

struct ScheduleArgs {
    std::string out;
    int steps = kDefaultSteps;
    double beta_start = kDefaultBetaStart, beta_end = kDefaultBetaEnd;
};

void run_schedule(const ScheduleArgs& a) {
    const NoiseSchedule s = make_linear_schedule(a.steps, a.beta_start, a.beta_end);
    ensure_directory(a.out);
    RunManifest run("schedule", g_argv);
    std::ofstream os(fs::path(a.out) / "schedule.csv", std::ios::binary | std::ios::trunc);
    write_schedule_csv(os, s);
    os.close();
    run.output("schedule.csv");
    run.set("steps", a.steps);
    run.set("beta_start", a.beta_start);
    run.set("beta_end", a.beta_end);
    run.write(a.out);
}

}  // namespace

int main(int argc, char** argv) {
    g_argv.assign(argv, argv + argc);
    CLI::App app{"Wavelet-domain implicit shape toolkit"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    PrepareArgs prep;
    auto* c = app.add_subcommand("prepare", "Mesh or scene to TSDF, pyramid and compactness report");
    auto* scene_opt = c->add_option("--scene", prep.scene, "Scene JSON")->check(CLI::ExistingFile);
    c->add_option("--obj", prep.obj, "Mesh (normalized before sampling)")->check(CLI::ExistingFile)->excludes(scene_opt);
    c->add_option("--res", prep.res, "TSDF resolution")->check(CLI::Range(8, 1024));
    c->add_option("--levels", prep.levels, "Wavelet levels J")->check(CLI::Range(1, 16));
    c->add_option("--bank", prep.bank, "bior6.8 or haar");
    c->add_option("--out", prep.out)->required();
    c->callback([&] { run_prepare(prep); });

    DecomposeArgs dec;
    c = app.add_subcommand("decompose", "WSV1 volume to WSP1 pyramid");
    c->add_option("--input", dec.input)->required()->check(CLI::ExistingFile);
    c->add_option("--levels", dec.levels)->check(CLI::Range(1, 16));
    c->add_option("--bank", dec.bank);
    c->add_option("--out", dec.out)->required();
    c->callback([&] { run_decompose(dec); });

    ReconstructArgs rec;
    c = app.add_subcommand("reconstruct", "WSP1 pyramid to WSV1 volume");
    c->add_option("--input", rec.input)->required()->check(CLI::ExistingFile);
    c->add_option("--out", rec.out)->required();
    c->callback([&] { run_reconstruct(rec); });

    ReconstructArgs trunc;
    c = app.add_subcommand("reconstruct-truncated", "Reconstruct from the coarsest two levels only");
    c->add_option("--input", trunc.input)->required()->check(CLI::ExistingFile);
    c->add_option("--source", trunc.source, "Original volume, for the compactness report")->check(CLI::ExistingFile);
    c->add_option("--out", trunc.out)->required();
    c->callback([&] { run_reconstruct_truncated(trunc); });

    BuildArgs build;
    c = app.add_subcommand("build-model", "Oracle corpus and model manifest from shapes");
    c->add_option("--input", build.inputs, "Shapes (.json scene, .obj mesh or .wsv TSDF)")->required()->check(CLI::ExistingFile);
    c->add_option("--weights", build.weights, "Prior weight per shape");
    c->add_option("--res", build.res)->check(CLI::Range(8, 1024));
    c->add_option("--levels", build.levels)->check(CLI::Range(1, 16));
    c->add_option("--bank", build.bank);
    c->add_option("--tau", build.tau, "Latent tilt width");
    c->add_option("--latent-length", build.latent_length)->check(CLI::PositiveNumber);
    c->add_option("--pool", build.pool)->check(CLI::PositiveNumber);
    c->add_option("--encoder-seed", build.encoder_seed);
    c->add_option("--steps", build.steps)->check(CLI::Range(1, 100000));
    c->add_option("--beta-start", build.beta_start);
    c->add_option("--beta-end", build.beta_end);
    c->add_option("--out", build.out)->required();
    c->callback([&] { run_build_model(build); });

    GenerateArgs gen;
    c = app.add_subcommand("generate", "Sample shapes from a model");
    c->add_option("--model", gen.model)->required()->check(CLI::ExistingFile);
    c->add_option("--seed", gen.seed);
    c->add_option("--count", gen.count);
    c->add_option("--ddim-steps", gen.ddim_steps, "Deterministic sampler over this many steps");
    c->add_option("--latent", gen.latent, "Condition on a latent code")->check(CLI::ExistingFile);
    c->add_option("--out", gen.out)->required();
    c->callback([&] { run_generate(gen); });

    InvertArgs inv;
    c = app.add_subcommand("invert", "Encode, refine and regenerate a shape");
    c->add_option("--input", inv.input)->required()->check(CLI::ExistingFile);
    c->add_option("--model", inv.model)->required()->check(CLI::ExistingFile);
    c->add_flag("--no-refine", inv.no_refine);
    c->add_option("--iterations", inv.iterations)->check(CLI::Range(0, 1000000));
    c->add_option("--learning-rate", inv.learning_rate)->check(CLI::PositiveNumber);
    c->add_option("--ddim-steps", inv.ddim_steps);
    c->add_option("--seed", inv.seed);
    c->add_option("--out", inv.out)->required();
    c->callback([&] { run_invert(inv); });

    InterpolateArgs interp;
    c = app.add_subcommand("interpolate", "Whole-shape interpolation frames");
    c->add_option("--za", interp.za)->required()->check(CLI::ExistingFile);
    c->add_option("--zb", interp.zb)->required()->check(CLI::ExistingFile);
    c->add_option("--model", interp.model)->required()->check(CLI::ExistingFile);
    c->add_option("--steps", interp.steps);
    c->add_option("--seed", interp.seed);
    c->add_option("--ddim-steps", interp.ddim_steps);
    c->add_option("--out", interp.out)->required();
    c->callback([&] { run_interpolate(interp); });

    std::string plan_file, manip_out;
    c = app.add_subcommand("manipulate", "Region-aware manipulation from a plan file");
    c->add_option("--plan", plan_file)->required()->check(CLI::ExistingFile);
    c->add_option("--out", manip_out)->required();
    c->callback([&] { run_manipulate(plan_file, manip_out); });

    EvalArgs ev;
    c = app.add_subcommand("eval", "COV, MMD and 1-NNA between two mesh directories");
    c->add_option("--generated", ev.generated)->required();
    c->add_option("--reference", ev.reference)->required();
    c->add_option("--metric", ev.metric, "chamfer, emd or both");
    c->add_option("--points", ev.points)->check(CLI::PositiveNumber);
    c->add_option("--seed", ev.seed);
    c->add_option("--out", ev.out)->required();
    c->callback([&] { run_eval(ev); });

    NoveltyArgs nov;
    c = app.add_subcommand("novelty", "Nearest training shapes and LFD distribution");
    c->add_option("--generated", nov.generated)->required();
    c->add_option("--train", nov.train)->required();
    c->add_option("--k", nov.k);
    c->add_option("--bins", nov.bins);
    c->add_option("--points", nov.points)->check(CLI::PositiveNumber);
    c->add_option("--seed", nov.seed);
    c->add_option("--out", nov.out)->required();
    c->callback([&] { run_novelty(nov); });

    ScheduleArgs sch;
    c = app.add_subcommand("schedule", "Write the noise schedule table");
    c->add_option("--steps", sch.steps)->check(CLI::Range(1, 100000));
    c->add_option("--beta-start", sch.beta_start);
    c->add_option("--beta-end", sch.beta_end);
    c->add_option("--out", sch.out)->required();
    c->callback([&] { run_schedule(sch); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
