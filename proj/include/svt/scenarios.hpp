#pragma once

#include <string>

#include "svt/harness.hpp"

namespace svt {

/// Default Ellip scenario: a 2.0 m x 0.75 m ellipse in the yz-plane at
/// x = 4.5 m, three laps in 45 s (peak speed 0.838 m/s), tracked at the given
/// offset. Matches scenarios/ellip_<offset>.json.
inline ScenarioConfig default_ellip_scenario(double offset) {
    ScenarioConfig cfg;
    cfg.name = "ellip-" + std::to_string(offset).substr(0, 3);
    cfg.trajectory.kind = TrajectoryKind::Ellipse;
    cfg.trajectory.center = {4.5, 0.0, 1.5};
    cfg.trajectory.semi_axes = {0.0, 2.0, 0.75};
    cfg.trajectory.angular_rate = 0.419;
    cfg.trajectory.phase = 0.0;
    cfg.trajectory.duration = 45.0;
    cfg.duration = 45.0;
    cfg.offset = offset;
    cfg.svt.offset = offset;
    cfg.noise.pos_sigma = {0.02, 0.02, 0.02};
    cfg.noise.dropout_prob = 0.05;
    return cfg;
}

/// Default SLem scenario: the eight-waypoint figure-eight spanning
/// 4.0 m x 1.5 m in the yz-plane, constant 0.6 m/s, 40 s.
inline ScenarioConfig default_slem_scenario(double offset) {
    ScenarioConfig cfg = default_ellip_scenario(offset);
    cfg.name = "slem-" + std::to_string(offset).substr(0, 3);
    cfg.trajectory.kind = TrajectoryKind::SquareLemniscate;
    cfg.trajectory.speed = 0.6;
    cfg.trajectory.duration = 40.0;
    cfg.duration = 40.0;
    return cfg;
}

} // namespace svt
