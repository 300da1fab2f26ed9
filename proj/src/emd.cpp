#include "waveshape/emd.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "waveshape/errors.hpp"

namespace waveshape {

std::vector<std::size_t> hungarian_assignment(const std::vector<double>& cost, std::size_t n) {
    if (cost.size() != n * n) throw ShapeMismatchError("hungarian: cost matrix is not n x n");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is a virtual start.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        owner[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = owner[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> match(n);
    for (std::size_t j = 1; j <= n; ++j) match[owner[j] - 1] = j - 1;
    return match;
}

std::vector<std::size_t> auction_assignment(const std::vector<double>& cost, std::size_t n,
                                            const AuctionOptions& o) {
    if (cost.size() != n * n) throw ShapeMismatchError("auction: cost matrix is not n x n");
    if (!(o.final_epsilon > 0.0) || !(o.epsilon_factor > 1.0)) throw ValidationError("invalid auction options");
    std::vector<std::size_t> match(n);
    std::iota(match.begin(), match.end(), 0);
    if (n <= 1) return match;
    const double max_cost = *std::max_element(cost.begin(), cost.end());
    if (!(max_cost > 0.0)) return match;
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<double> price(n, 0.0);
    std::vector<std::size_t> owner(n, kNone);
    const double eps_final = o.final_epsilon * max_cost;
    double eps = std::max(max_cost / 4.0, eps_final);
    while (true) {
        std::fill(owner.begin(), owner.end(), kNone);
        std::fill(match.begin(), match.end(), kNone);
        std::deque<std::size_t> queue(n);
        std::iota(queue.begin(), queue.end(), 0);
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            double best = -std::numeric_limits<double>::infinity();
            double second = best;
            std::size_t best_j = 0;
            const double* row = cost.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) {
                const double value = -row[j] - price[j];
                if (value > best) {
                    second = best;
                    best = value;
                    best_j = j;
                } else if (value > second) {
                    second = value;
                }
            }
            price[best_j] += best - second + eps;
            if (owner[best_j] != kNone) {
                match[owner[best_j]] = kNone;
                queue.push_back(owner[best_j]);
            }
            owner[best_j] = i;
            match[i] = best_j;
        }
        if (eps <= eps_final) break;
        eps = std::max(eps / o.epsilon_factor, eps_final);
    }
    return match;
}

namespace {

std::vector<double> distance_matrix(const PointSet& p, const PointSet& q) {
    const std::size_t n = p.size();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = norm(p[i] - q[j]);
    }
    return cost;
}

void check_sizes(const PointSet& p, const PointSet& q) {
    if (p.empty() || q.empty()) throw ValidationError("EMD: empty point set");
    if (p.size() != q.size()) throw ShapeMismatchError("EMD: point sets differ in size");
}

double matched_mean(const std::vector<double>& cost, const std::vector<std::size_t>& match) {
    const std::size_t n = match.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost[i * n + match[i]];
    return total / static_cast<double>(n);
}

bool lex_less(const Vec3& a, const Vec3& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
}

}  // namespace

double emd_exact(const PointSet& p, const PointSet& q) {
    check_sizes(p, q);
    const auto cost = distance_matrix(p, q);
    return matched_mean(cost, hungarian_assignment(cost, p.size()));
}

double emd_auction(const PointSet& p, const PointSet& q, const AuctionOptions& options) {
    check_sizes(p, q);
    const auto cost = distance_matrix(p, q);
    return matched_mean(cost, auction_assignment(cost, p.size(), options));
}

double emd_approx(const PointSet& p, const PointSet& q) {
    check_sizes(p, q);
    const std::size_t n = p.size();
    // Match coincident points first; the rest go to a solver.
    std::vector<std::size_t> ip(n), iq(n);
    std::iota(ip.begin(), ip.end(), 0);
    std::iota(iq.begin(), iq.end(), 0);
    auto by_point = [](const PointSet& s) {
        return [&s](std::size_t a, std::size_t b) { return lex_less(s[a], s[b]) || (s[a] == s[b] && a < b); };
    };
    std::sort(ip.begin(), ip.end(), by_point(p));
    std::sort(iq.begin(), iq.end(), by_point(q));
    PointSet rest_p, rest_q;
    std::size_t a = 0, b = 0;
    while (a < n && b < n) {
        if (p[ip[a]] == q[iq[b]]) {
            ++a;
            ++b;
        } else if (lex_less(p[ip[a]], q[iq[b]])) {
            rest_p.push_back(p[ip[a++]]);
        } else {
            rest_q.push_back(q[iq[b++]]);
        }
    }
    while (a < n) rest_p.push_back(p[ip[a++]]);
    while (b < n) rest_q.push_back(q[iq[b++]]);
    if (rest_p.empty()) return 0.0;
    const double partial = rest_p.size() <= kExactEmdLimit ? emd_exact(rest_p, rest_q) : emd_auction(rest_p, rest_q);
    return partial * static_cast<double>(rest_p.size()) / static_cast<double>(n);
}

}  // namespace waveshape
