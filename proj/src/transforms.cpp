#include "focsim/transforms.hpp"

#include <cmath>

#include "focsim/errors.hpp"

namespace focsim {

namespace {

constexpr double kInvSqrt3 = 1.0 / std::numbers::sqrt3;
constexpr double kHalfSqrt3 = std::numbers::sqrt3 / 2.0;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InvalidInput(std::string(what) + ": non-finite input");
    }
}

}  // namespace

double normalize_angle(double theta) {
    require_finite(theta, "normalize_angle");
    double wrapped = std::fmod(theta, kTwoPi);
    if (wrapped < 0.0) {
        wrapped += kTwoPi;
    }
    // fmod of a tiny negative value plus 2*pi can round up to exactly 2*pi.
    if (wrapped >= kTwoPi) {
        wrapped = 0.0;
    }
    return wrapped;
}

ElectricalAngle::ElectricalAngle(double radians) : theta_(normalize_angle(radians)) {}

AlphaBetaFrame clarke(const AbcFrame& abc) {
    require_finite(abc.a, "clarke");
    require_finite(abc.b, "clarke");
    require_finite(abc.c, "clarke");
    return {
        (2.0 / 3.0) * (abc.a - 0.5 * abc.b - 0.5 * abc.c),
        kInvSqrt3 * (abc.b - abc.c),
        (abc.a + abc.b + abc.c) / 3.0,
    };
}

AbcFrame inverse_clarke(const AlphaBetaFrame& ab) {
    require_finite(ab.alpha, "inverse_clarke");
    require_finite(ab.beta, "inverse_clarke");
    require_finite(ab.zero, "inverse_clarke");
    return {
        ab.alpha + ab.zero,
        -0.5 * ab.alpha + kHalfSqrt3 * ab.beta + ab.zero,
        -0.5 * ab.alpha - kHalfSqrt3 * ab.beta + ab.zero,
    };
}

DqFrame park(const AlphaBetaFrame& ab, ElectricalAngle theta) {
    require_finite(ab.alpha, "park");
    require_finite(ab.beta, "park");
    const double c = std::cos(theta.radians());
    const double s = std::sin(theta.radians());
    return {ab.alpha * c + ab.beta * s, -ab.alpha * s + ab.beta * c};
}

AlphaBetaFrame inverse_park(const DqFrame& dq, ElectricalAngle theta) {
    require_finite(dq.d, "inverse_park");
    require_finite(dq.q, "inverse_park");
    const double c = std::cos(theta.radians());
    const double s = std::sin(theta.radians());
    return {dq.d * c - dq.q * s, dq.d * s + dq.q * c, 0.0};
}

}  // namespace focsim
