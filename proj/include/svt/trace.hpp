#pragma once

#include <vector>

#include "svt/controller.hpp"
#include "svt/mode.hpp"
#include "svt/sim_core.hpp"
#include "svt/vec3.hpp"

namespace svt {

/// One simulation step: state at time t, the mode applied over [t, t+dt), the
/// geometric visibility flag, the target-position estimate (NaN before the
/// filter initializes), the Lyapunov value of the ground-truth tracking error,
/// and any controller event.
struct TraceSample {
    double t = 0.0;
    Mode mode = Mode::Tracking;
    bool vis = false;
    KinState target;
    KinState pursuer;
    Vec3 estimate;
    double lyap = 0.0;
    StepEvent event = StepEvent::None;
};

/// Time-indexed record of a run; input to all metrics and certification.
struct Trace {
    double dt = 0.01;
    double offset = 1.0; // m, tracking offset used in the error definition
    std::vector<TraceSample> samples;

    double duration() const { return samples.size() * dt; }
};

/// Tracking error of a sample: (x_T - x_P) - (offset, 0, 0).
inline Vec3 tracking_error(const TraceSample& s, double offset) {
    return (s.target.pos - s.pursuer.pos) - Vec3{offset, 0.0, 0.0};
}

} // namespace svt
