#pragma once

#include <vector>

#include "waveshape/point_metrics.hpp"

namespace waveshape {

/// Exact minimum-cost perfect matching (shortest augmenting paths with
/// potentials, O(n^3)). cost is n x n row-major. Returns the column matched
/// to each row.
std::vector<std::size_t> hungarian_assignment(const std::vector<double>& cost, std::size_t n);

struct AuctionOptions {
    /// Final bid increment as a fraction of the largest cost. The matched
    /// mean cost is within this many cost units of the optimum.
    double final_epsilon = 1e-4;
    /// Increment shrink factor between scaling phases.
    double epsilon_factor = 5.0;
};

/// Forward auction with epsilon scaling: epsilon starts at max_cost / 4 and
/// is divided by epsilon_factor each phase until final_epsilon * max_cost.
/// Bidders are served in index order, so results are deterministic.
std::vector<std::size_t> auction_assignment(const std::vector<double>& cost, std::size_t n,
                                            const AuctionOptions& options = {});

inline constexpr std::size_t kExactEmdLimit = 512;

/// Mean Euclidean distance over an optimal matching, solved exactly.
double emd_exact(const PointSet& p, const PointSet& q);
/// Same quantity from the auction solver.
double emd_auction(const PointSet& p, const PointSet& q, const AuctionOptions& options = {});
/// Exact for n <= 512, auction above. Coincident point pairs are matched up
/// front, which never worsens an optimal matching under a metric cost.
double emd_approx(const PointSet& p, const PointSet& q);

}  // namespace waveshape
