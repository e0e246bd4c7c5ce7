#include "tofslam/geometry.hpp"

#include <stdexcept>

namespace tofslam {

Mat2 rot2(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("rot2: non-finite angle");
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {{c, -s, s, c}};
}

double angle_norm(double a) {
    if (!std::isfinite(a)) {
        throw std::invalid_argument("angle_norm: non-finite angle");
    }
    double r = std::fmod(a, kTwoPi);
    if (r > kPi) {
        r -= kTwoPi;
    } else if (r <= -kPi) {
        r += kTwoPi;
    }
    return r;
}

Pose2::Pose2(double x_, double y_, double psi_) : x(x_), y(y_), psi(angle_norm(psi_)) {}

Vec2 Rigid2::apply(Vec2 p) const { return rot2(rotation) * p + translation; }

Pose2 Rigid2::apply(const Pose2& p) const {
    const Vec2 t = apply(p.position());
    return {t.x, t.y, p.psi + rotation};
}

Rigid2 Rigid2::inverse() const {
    const Mat2 rt = rot2(-rotation);
    const Vec2 t = rt * translation;
    return {angle_norm(-rotation), {-t.x, -t.y}};
}

Rigid2 compose(const Rigid2& a, const Rigid2& b) {
    return {angle_norm(a.rotation + b.rotation), rot2(a.rotation) * b.translation + a.translation};
}

}  // namespace tofslam
