#include "waveshape/set_metrics.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "waveshape/emd.hpp"
#include "waveshape/errors.hpp"
#include "waveshape/parallel.hpp"

namespace waveshape {

const char* to_string(BaseMetric m) { return m == BaseMetric::chamfer ? "chamfer" : "emd"; }

DistanceMatrix pairwise(const std::vector<PointSet>& a, const std::vector<PointSet>& b,
                        const std::function<double(const PointSet&, const PointSet&)>& metric) {
    DistanceMatrix d{a.size(), b.size(), std::vector<double>(a.size() * b.size())};
    parallel_for(d.values.size(), [&](std::size_t idx) { d.values[idx] = metric(a[idx / d.cols], b[idx % d.cols]); });
    return d;
}

SetMetrics set_metrics(const DistanceMatrix& gr, const DistanceMatrix& gg, const DistanceMatrix& rr) {
    const std::size_t ng = gr.rows;
    const std::size_t nr = gr.cols;
    if (ng == 0 || nr == 0) throw ValidationError("set metrics need non-empty generated and reference sets");
    if (gg.rows != ng || gg.cols != ng || rr.rows != nr || rr.cols != nr) {
        throw ShapeMismatchError("set metric distance matrices have inconsistent sizes");
    }
    SetMetrics out;
    std::set<std::size_t> covered;
    for (std::size_t g = 0; g < ng; ++g) {
        std::size_t best = 0;
        for (std::size_t r = 1; r < nr; ++r) {
            if (gr(g, r) < gr(g, best)) best = r;
        }
        covered.insert(best);
    }
    out.coverage = static_cast<double>(covered.size()) / static_cast<double>(nr);
    double mmd = 0.0;
    for (std::size_t r = 0; r < nr; ++r) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < ng; ++g) best = std::min(best, gr(g, r));
        mmd += best;
    }
    out.mmd = mmd / static_cast<double>(nr);
    // Union index u < ng is generated shape u, else reference u - ng.
    auto dist = [&](std::size_t a, std::size_t b) {
        if (a < ng && b < ng) return gg(a, b);
        if (a >= ng && b >= ng) return rr(a - ng, b - ng);
        if (a < ng) return gr(a, b - ng);
        return gr(b, a - ng);
    };
    const std::size_t total = ng + nr;
    std::size_t correct = 0;
    for (std::size_t u = 0; u < total; ++u) {
        std::size_t best = total;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < total; ++w) {
            if (w == u) continue;
            const double d = dist(u, w);
            if (best == total || d < best_d) {
                best_d = d;
                best = w;
            }
        }
        if (best < total && ((best < ng) == (u < ng))) ++correct;
    }
    out.one_nna = static_cast<double>(correct) / static_cast<double>(total);
    return out;
}

SetMetrics set_metrics(const std::vector<PointSet>& generated, const std::vector<PointSet>& reference,
                       BaseMetric metric) {
    if (generated.empty() || reference.empty()) {
        throw ValidationError("set metrics need non-empty generated and reference sets");
    }
    std::function<double(const PointSet&, const PointSet&)> f;
    if (metric == BaseMetric::chamfer) {
        f = [](const PointSet& a, const PointSet& b) { return chamfer(a, b); };
    } else {
        f = [](const PointSet& a, const PointSet& b) { return emd_approx(a, b); };
    }
    return set_metrics(pairwise(generated, reference, f), pairwise(generated, generated, f),
                       pairwise(reference, reference, f));
}

std::vector<Ranked> rank_topk(const std::vector<double>& distances, std::size_t k) {
    std::vector<Ranked> all;
    for (std::size_t i = 0; i < distances.size(); ++i) all.push_back({i, distances[i]});
    std::stable_sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) { return a.distance < b.distance; });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace waveshape
