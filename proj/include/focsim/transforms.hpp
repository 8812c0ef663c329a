#pragma once

// Reference-frame transforms between the three-phase (abc), stationary
// two-axis (alpha/beta) and rotor (d/q) frames.
//
// Clarke uses the amplitude-invariant scaling: a balanced set of peak I maps
// to an alpha/beta vector of length I. The angle theta runs from the alpha
// axis to the d axis, counterclockwise.

#include <numbers>

namespace focsim {

struct AbcFrame {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct AlphaBetaFrame {
    double alpha = 0.0;
    double beta = 0.0;
    double zero = 0.0;  // homopolar component
};

struct DqFrame {
    double d = 0.0;
    double q = 0.0;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps any finite angle into [0, 2*pi).
double normalize_angle(double theta);

class ElectricalAngle {
public:
    ElectricalAngle() = default;
    explicit ElectricalAngle(double radians);

    double radians() const noexcept { return theta_; }

private:
    double theta_ = 0.0;
};

AlphaBetaFrame clarke(const AbcFrame& abc);
AbcFrame inverse_clarke(const AlphaBetaFrame& ab);

DqFrame park(const AlphaBetaFrame& ab, ElectricalAngle theta);
AlphaBetaFrame inverse_park(const DqFrame& dq, ElectricalAngle theta);

}  // namespace focsim
