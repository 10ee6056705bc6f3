#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "svt/rng.hpp"
#include "svt/sim_core.hpp"
#include "svt/vec3.hpp"

namespace svt {

/// Axis-aligned interval box (positions or velocities).
struct IntervalBox {
    Vec3 lo;
    Vec3 hi;

    static IntervalBox point(const Vec3& p) { return {p, p}; }

    bool valid() const {
        return lo.finite() && hi.finite() &&
               lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z;
    }
    bool contains(const Vec3& p, double tol = 0.0) const {
        return p.x >= lo.x - tol && p.x <= hi.x + tol &&
               p.y >= lo.y - tol && p.y <= hi.y + tol &&
               p.z >= lo.z - tol && p.z <= hi.z + tol;
    }
    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 half_extent() const { return (hi - lo) * 0.5; }

    std::vector<Vec3> corners() const {
        std::vector<Vec3> out;
        out.reserve(8);
        for (int ix = 0; ix < 2; ++ix)
            for (int iy = 0; iy < 2; ++iy)
                for (int iz = 0; iz < 2; ++iz)
                    out.push_back({ix ? hi.x : lo.x, iy ? hi.y : lo.y, iz ? hi.z : lo.z});
        return out;
    }
};

/// Bounded-acceleration double-integrator reach parameters: symmetric per-axis
/// acceleration bound and prediction horizon.
struct ReachParams {
    double a_max = 2.0; // m/s^2
    double t_R = 1.5;   // s

    bool valid() const { return a_max > 0.0 && t_R > 0.0; }
};

/// Positions reachable at exactly time t_R by a double integrator starting
/// anywhere in pos0 x vel0 under any acceleration profile bounded by +-a_max
/// per axis. Tight per axis: position at t_R is monotone in initial position,
/// initial velocity, and the acceleration profile, with extremes at constant
/// +-a_max, so
///   hi' = pos0.hi + vel0.hi*t + a_max*t^2/2,  lo' = pos0.lo + vel0.lo*t - a_max*t^2/2.
inline IntervalBox reach_position_box(const IntervalBox& pos0, const IntervalBox& vel0,
                                      const ReachParams& p) {
    if (!pos0.valid() || !vel0.valid()) throw std::invalid_argument("reach_position_box: invalid box");
    if (!(p.a_max >= 0.0) || !(p.t_R >= 0.0)) throw std::invalid_argument("reach_position_box: invalid params");
    const double t = p.t_R;
    const double acc = 0.5 * p.a_max * t * t;
    IntervalBox out;
    out.hi = pos0.hi + vel0.hi * t + Vec3{acc, acc, acc};
    out.lo = pos0.lo + vel0.lo * t - Vec3{acc, acc, acc};
    return out;
}

/// Smallest sphere containing the box: center at the box center, radius the
/// Euclidean half-diagonal.
inline std::pair<Vec3, double> bounding_sphere(const IntervalBox& box) {
    if (!box.valid()) throw std::invalid_argument("bounding_sphere: invalid box");
    return {box.center(), box.half_extent().norm()};
}

/// Monte Carlo endpoint sampler used as the containment oracle for
/// reach_position_box. Each sample integrates a piecewise-constant random
/// acceleration profile exactly. Samples 0 and 1 are the saturated constant
/// +a_max / -a_max profiles, so the per-axis box extremes are attained.
inline std::vector<Vec3> mc_reach_samples(const Vec3& pos0, const Vec3& vel0,
                                          const ReachParams& p, std::size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("mc_reach_samples: n must be >= 1");
    std::vector<Vec3> out;
    out.reserve(n);
    const auto endpoint = [&](const std::vector<double>& times, const std::vector<Vec3>& accels) {
        KinState s{pos0, vel0};
        double prev = 0.0;
        for (std::size_t i = 0; i < accels.size(); ++i) {
            const double seg = times[i] - prev;
            s = step_double_integrator(s, accels[i], seg);
            prev = times[i];
        }
        return s.pos;
    };
    const double a = p.a_max;
    out.push_back(endpoint({p.t_R}, {{a, a, a}}));
    if (n > 1) out.push_back(endpoint({p.t_R}, {{-a, -a, -a}}));
    while (out.size() < n) {
        const std::size_t segs = 1 + static_cast<std::size_t>(rng.below(4));
        std::vector<double> times;
        for (std::size_t i = 0; i + 1 < segs; ++i) times.push_back(rng.uniform(0.0, p.t_R));
        times.push_back(p.t_R);
        std::sort(times.begin(), times.end());
        std::vector<Vec3> accels;
        for (std::size_t i = 0; i < segs; ++i)
            accels.push_back({rng.uniform(-a, a), rng.uniform(-a, a), rng.uniform(-a, a)});
        out.push_back(endpoint(times, accels));
    }
    return out;
}

} // namespace svt
