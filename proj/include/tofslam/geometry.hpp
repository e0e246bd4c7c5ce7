#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace tofslam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double squared_norm(Vec2 a) { return a.x * a.x + a.y * a.y; }

/// Row-major 2x2 matrix.
struct Mat2 {
    std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};

    double operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }
    double det() const { return m[0] * m[3] - m[1] * m[2]; }
    Vec2 operator*(Vec2 v) const { return {m[0] * v.x + m[1] * v.y, m[2] * v.x + m[3] * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {{m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3],
                 m[2] * o.m[0] + m[3] * o.m[2], m[2] * o.m[1] + m[3] * o.m[3]}};
    }
};

/// Planar rotation matrix [[cos, -sin], [sin, cos]]. Throws std::invalid_argument
/// for non-finite angles.
Mat2 rot2(double theta);

/// Wraps an angle into (-pi, pi]. Throws std::invalid_argument for non-finite input.
double angle_norm(double a);

/// Planar pose in the world frame. Heading is kept in (-pi, pi].
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;

    Pose2() = default;
    Pose2(double x_, double y_, double psi_);

    Vec2 position() const { return {x, y}; }
    friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// Rigid-body transform p -> R(rotation) p + translation.
struct Rigid2 {
    double rotation = 0.0;
    Vec2 translation{};

    static Rigid2 identity() { return {}; }
    static Rigid2 from_pose(const Pose2& p) { return {p.psi, {p.x, p.y}}; }

    Vec2 apply(Vec2 p) const;
    Pose2 apply(const Pose2& p) const;
    Rigid2 inverse() const;
    Pose2 as_pose() const { return {translation.x, translation.y, rotation}; }
};

/// compose(a, b) applies b first, then a.
Rigid2 compose(const Rigid2& a, const Rigid2& b);

}  // namespace tofslam
