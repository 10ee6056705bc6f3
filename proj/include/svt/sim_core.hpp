#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "svt/vec3.hpp"

namespace svt {

/// Position/velocity pair of a point mass; the common state of target and pursuer.
struct KinState {
    Vec3 pos; // m
    Vec3 vel; // m/s
};

/// Axis-aligned box the target trajectories must stay inside.
struct Workspace {
    Vec3 lo;
    Vec3 hi;

    bool valid() const { return lo.x < hi.x && lo.y < hi.y && lo.z < hi.z; }
    bool contains(const Vec3& p, double tol = 0.0) const {
        return p.x >= lo.x - tol && p.x <= hi.x + tol &&
               p.y >= lo.y - tol && p.y <= hi.y + tol &&
               p.z >= lo.z - tol && p.z <= hi.z + tol;
    }
};

enum class TrajectoryKind { Ellipse, SquareLemniscate, Waypoints };

/// Parametric target trajectory. Ellipse runs in the yz-plane around `center`
/// (semi_axes.y, semi_axes.z are the two half-axes); SquareLemniscate is a
/// constant-speed piecewise-linear figure-eight generated from `center` and
/// semi_axes; Waypoints is an explicit constant-speed closed polyline.
struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::Ellipse;
    Vec3 center{4.5, 0.0, 1.5};
    Vec3 semi_axes{0.0, 2.0, 0.75};   // per-axis half spans, m
    double angular_rate = 0.419;      // rad/s, Ellipse only
    double speed = 0.6;               // m/s, waypoint paths only
    double duration = 45.0;           // s
    double phase = 0.0;               // rad, Ellipse only
    std::vector<Vec3> waypoints;      // Waypoints kind only
};

/// The eight-waypoint figure-eight used by the SquareLemniscate kind:
/// two diamonds joined at `center`, spanning 2*semi.y by 2*semi.z in the
/// yz-plane (x is constant).
inline std::vector<Vec3> square_lemniscate_waypoints(const Vec3& center, const Vec3& semi) {
    const double ay = semi.y, az = semi.z;
    const double cx = center.x, cy = center.y, cz = center.z;
    return {
        {cx, cy, cz},
        {cx, cy + ay / 2.0, cz + az},
        {cx, cy + ay, cz},
        {cx, cy + ay / 2.0, cz - az},
        {cx, cy, cz},
        {cx, cy - ay / 2.0, cz + az},
        {cx, cy - ay, cz},
        {cx, cy - ay / 2.0, cz - az},
    };
}

namespace detail {

inline KinState eval_waypoint_loop(const std::vector<Vec3>& wps, double speed, double t) {
    if (wps.size() < 2) throw std::invalid_argument("waypoint trajectory needs >= 2 waypoints");
    const std::size_t n = wps.size();
    std::vector<double> seg_len(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        seg_len[i] = (wps[(i + 1) % n] - wps[i]).norm();
        if (seg_len[i] <= 0.0) throw std::invalid_argument("zero-length waypoint segment");
        total += seg_len[i];
    }
    double s = std::fmod(speed * t, total);
    if (s < 0.0) s += total;
    for (std::size_t i = 0; i < n; ++i) {
        if (s <= seg_len[i] || i == n - 1) {
            const Vec3 dir = (wps[(i + 1) % n] - wps[i]) / seg_len[i];
            return {wps[i] + dir * s, dir * speed};
        }
        s -= seg_len[i];
    }
    return {wps[0], Vec3{}}; // unreachable
}

} // namespace detail

/// Exact position and analytic velocity of the scripted target at time t.
/// Valid for 0 <= t <= spec.duration.
inline KinState eval_trajectory(const TrajectorySpec& spec, double t) {
    if (!(t >= 0.0 && t <= spec.duration))
        throw std::out_of_range("eval_trajectory: t=" + std::to_string(t) +
                                " outside [0, " + std::to_string(spec.duration) + "]");
    switch (spec.kind) {
    case TrajectoryKind::Ellipse: {
        const double w = spec.angular_rate;
        const double a = w * t + spec.phase;
        const double ay = spec.semi_axes.y, az = spec.semi_axes.z;
        KinState s;
        s.pos = {spec.center.x,
                 spec.center.y + ay * std::cos(a),
                 spec.center.z + az * std::sin(a)};
        s.vel = {0.0, -ay * w * std::sin(a), az * w * std::cos(a)};
        return s;
    }
    case TrajectoryKind::SquareLemniscate:
        return detail::eval_waypoint_loop(
            square_lemniscate_waypoints(spec.center, spec.semi_axes), spec.speed, t);
    case TrajectoryKind::Waypoints:
        return detail::eval_waypoint_loop(spec.waypoints, spec.speed, t);
    }
    throw std::logic_error("unknown trajectory kind");
}

/// Exact constant-acceleration update over dt:
///   pos' = pos + vel*dt + accel*dt^2/2,  vel' = vel + accel*dt.
inline KinState step_double_integrator(const KinState& s, const Vec3& accel, double dt) {
    KinState out;
    out.pos = s.pos + s.vel * dt + accel * (0.5 * dt * dt);
    out.vel = s.vel + accel * dt;
    return out;
}

/// Clamp each velocity component into [-limit, +limit]; position unchanged.
inline KinState clamp_velocity(const KinState& s, const Vec3& limits) {
    return {s.pos, clamp_abs(s.vel, limits)};
}

} // namespace svt
