#include "tofslam/icp.hpp"

#include <limits>

#include "tofslam/parallel.hpp"

namespace tofslam {

std::vector<std::size_t> find_correspondences(std::span<const Vec2> src, std::span<const Vec2> dst,
                                              unsigned workers) {
    if (src.empty() || dst.empty()) {
        throw std::invalid_argument("find_correspondences: empty scan");
    }
    std::vector<std::size_t> match(src.size());
    parallel_chunks(src.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Vec2 p = src[i];
            std::size_t best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < dst.size(); ++j) {
                const double dx = p.x - dst[j].x;
                const double dy = p.y - dst[j].y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {  // strict: first minimum wins
                    best_d2 = d2;
                    best = j;
                }
            }
            match[i] = best;
        }
    });
    return match;
}

Rigid2 optimal_transform(std::span<const Vec2> src, std::span<const Vec2> dst) {
    if (src.size() != dst.size()) {
        throw std::invalid_argument("optimal_transform: pair count mismatch");
    }
    if (src.size() < 2) {
        throw DegenerateAlignment("optimal_transform: need at least two pairs");
    }
    const double n = static_cast<double>(src.size());
    Vec2 cp{}, cq{};
    double scale = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        cp = cp + src[i];
        cq = cq + dst[i];
        scale += squared_norm(src[i]);
    }
    cp = (1.0 / n) * cp;
    cq = (1.0 / n) * cq;

    double spread = 0.0;
    double sum_dot = 0.0;
    double sum_cross = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Vec2 p = src[i] - cp;
        const Vec2 q = dst[i] - cq;
        spread += squared_norm(p);
        sum_dot += dot(p, q);
        sum_cross += cross(p, q);
    }
    if (spread <= 1e-24 * std::max(1.0, scale)) {
        throw DegenerateAlignment("optimal_transform: source points coincide, rotation unobservable");
    }
    if (sum_dot == 0.0 && sum_cross == 0.0) {
        throw DegenerateAlignment("optimal_transform: destination points coincide");
    }
    // The 2x2 SVD solution reduces to the angle of the cross-covariance; det(R) = +1.
    const double theta = std::atan2(sum_cross, sum_dot);
    const Vec2 t = cq - rot2(theta) * cp;
    return {angle_norm(theta), t};
}

IcpResult icp_align(std::span<const Vec2> src, std::span<const Vec2> dst, const IcpOptions& opts) {
    if (src.size() < 2 || dst.size() < 2) {
        throw std::invalid_argument("icp_align: scans need at least two points");
    }
    if (opts.iterations < 1) {
        throw std::invalid_argument("icp_align: iterations must be positive");
    }
    IcpResult result;
    result.iterations_run = opts.iterations;
    result.e_icp_history.reserve(static_cast<std::size_t>(opts.iterations));

    std::vector<Vec2> moved(src.begin(), src.end());
    std::vector<Vec2> paired(src.size());
    for (int k = 0; k < opts.iterations; ++k) {
        const auto match = find_correspondences(moved, dst, opts.workers);
        for (std::size_t i = 0; i < moved.size(); ++i) {
            paired[i] = dst[match[i]];
        }
        const Rigid2 step = optimal_transform(moved, paired);
        double err = 0.0;
        for (std::size_t i = 0; i < moved.size(); ++i) {
            moved[i] = step.apply(moved[i]);
            err += norm(moved[i] - paired[i]);
        }
        result.e_icp = err / static_cast<double>(moved.size());
        result.e_icp_history.push_back(result.e_icp);
        result.transform = compose(step, result.transform);

        if (std::abs(step.rotation) + norm(step.translation) < opts.early_exit_step) {
            result.settled_at = k + 1;
            break;
        }
    }
    return result;
}

}  // namespace tofslam
