#include "waveshape/tsdf.hpp"

#include <algorithm>
#include <atomic>

#include "waveshape/errors.hpp"
#include "waveshape/parallel.hpp"

namespace waveshape {

Volume3 tsdf_grid(std::size_t n) {
    if (n == 0) throw ValidationError("TSDF resolution must be positive");
    const double h = 2.0 / static_cast<double>(n);
    const double o = -1.0 + 0.5 * h;
    return Volume3(cube_dims(n), Vec3{o, o, o}, Vec3{h, h, h});
}

Volume3 sample_tsdf(const SdfSource& s, std::size_t n, TsdfStats* stats) {
    if (n < 8) throw ValidationError("TSDF resolution must be at least 8");
    Volume3 v = tsdf_grid(n);
    std::atomic<std::size_t> uncertain{0};
    parallel_for(n, [&](std::size_t k) {
        std::size_t local = 0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                bool flag = false;
                const double d = s.evaluate(v.position(i, j, k), &flag);
                if (flag) ++local;
                v(i, j, k) = std::clamp(d, -kTruncation, kTruncation);
            }
        }
        uncertain += local;
    });
    if (stats) stats->sign_uncertain = uncertain.load();
    return v;
}

}  // namespace waveshape
