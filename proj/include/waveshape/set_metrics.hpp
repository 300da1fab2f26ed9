#pragma once

#include <functional>
#include <vector>

#include "waveshape/point_metrics.hpp"

namespace waveshape {

enum class BaseMetric { chamfer, emd };
const char* to_string(BaseMetric m);

struct SetMetrics {
    double coverage = 0.0;  // fraction in [0, 1]
    double mmd = 0.0;
    double one_nna = 0.0;   // fraction in [0, 1]
};

/// Row-major matrix of `rows` x `cols` distances.
struct DistanceMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Evaluates metric(a[i], b[j]) for every pair, in parallel.
DistanceMatrix pairwise(const std::vector<PointSet>& a, const std::vector<PointSet>& b,
                        const std::function<double(const PointSet&, const PointSet&)>& metric);

/// COV: share of reference shapes that are the nearest reference of some
/// generated shape. MMD: mean over references of the distance to the closest
/// generated shape. 1-NNA: leave-one-out nearest-neighbour accuracy on the
/// union (generated first, then reference), ties to the lowest union index.
SetMetrics set_metrics(const DistanceMatrix& gen_ref, const DistanceMatrix& gen_gen, const DistanceMatrix& ref_ref);
SetMetrics set_metrics(const std::vector<PointSet>& generated, const std::vector<PointSet>& reference,
                       BaseMetric metric);

struct Ranked {
    std::size_t index;
    double distance;
};
/// Ascending by distance, ties by index; at most k entries.
std::vector<Ranked> rank_topk(const std::vector<double>& distances, std::size_t k);

}  // namespace waveshape
