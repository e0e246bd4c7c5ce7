#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tofslam/geometry.hpp"

namespace tofslam {

/// Thrown when the rotation between two point sets cannot be observed.
class DegenerateAlignment : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IcpOptions {
    int iterations = 25;
    unsigned workers = 1;
    /// Stop early once an iteration moves the estimate by less than this (translation norm
    /// plus absolute rotation). The result still reports `iterations` as run.
    double early_exit_step = 1e-12;
};

struct IcpResult {
    Rigid2 transform{};             // maps the source scan onto the destination scan
    double e_icp = 0.0;             // mean correspondence distance after the last update
    int iterations_run = 0;         // always IcpOptions::iterations
    std::optional<int> settled_at;  // iteration after which updates fell below early_exit_step
    std::vector<double> e_icp_history;  // e_icp after each executed iteration
};

/// For every source point, the index of its nearest destination point (exhaustive search,
/// ties resolved to the lowest index).
std::vector<std::size_t> find_correspondences(std::span<const Vec2> src, std::span<const Vec2> dst,
                                              unsigned workers = 1);

/// Least-squares rigid transform taking each src[i] onto dst[i].
Rigid2 optimal_transform(std::span<const Vec2> src, std::span<const Vec2> dst);

/// Point-to-point ICP from the identity for a fixed number of iterations.
IcpResult icp_align(std::span<const Vec2> src, std::span<const Vec2> dst,
                    const IcpOptions& opts = {});

}  // namespace tofslam
