#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <variant>

#include "svt/mode.hpp"
#include "svt/perception.hpp"
#include "svt/reachability.hpp"
#include "svt/sim_core.hpp"
#include "svt/vec3.hpp"

namespace svt {

/// Switched-tracker configuration.
///
/// Tracking regulates the camera-axis (x) distance to the target at `offset`
/// and damps lateral motion; lateral re-centering happens through recovery
/// poses, whose y/z come from the predicted target position. v_max caps the
/// pursuer x velocity in Tracking only. Recovery uses its own, stiffer gains
/// so the pursuer reaches x_R within t_R under the acceleration limit.
struct SvtConfig {
    double v_max = 1.0;          // m/s, tracking-mode x velocity cap
    double d_max = 20.0;         // m, max allowed backoff per recovery episode
    double t_R = 1.5;            // s, recovery horizon
    double offset = 1.0;         // m, desired distance along -x from the target
    double kp = 4.0;             // 1/s^2, tracking gain
    double kd = 4.0;             // 1/s, tracking damping
    double recovery_kp = 20.25;  // 1/s^2
    double recovery_kd = 9.0;    // 1/s
    int debounce_n = 3;          // consecutive misses before declaring loss
    double a_limit = 4.0;        // m/s^2, pursuer per-axis acceleration limit
    double target_a_max = 2.0;   // m/s^2, target accel bound fed to reachability

    /// All-positive check; returns a warning string (not an error) when the
    /// tracking gains are underdamped.
    std::optional<std::string> validate() const {
        auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
        if (bad(v_max) || bad(d_max) || bad(t_R) || bad(offset) || bad(kp) || bad(kd) ||
            bad(recovery_kp) || bad(recovery_kd) || bad(a_limit) || bad(target_a_max) ||
            debounce_n < 1)
            throw std::invalid_argument("SvtConfig: all parameters must be positive");
        if (kd * kd < 4.0 * kp)
            return std::string("tracking gains underdamped (kd^2 < 4 kp)");
        return std::nullopt;
    }
};

/// Braking law shared by the debounce hold and the baseline's lost branch.
inline Vec3 hover_brake(const Vec3& vel, const SvtConfig& cfg) {
    const Vec3 lim{cfg.a_limit, cfg.a_limit, cfg.a_limit};
    return clamp_abs(-cfg.kd * vel, lim);
}

/// Tracking-mode command. est_disp is the estimated target displacement
/// (x_T - x_P), est_rel_vel the estimated relative velocity. The x axis runs
/// a PD on (est_disp.x - offset); y/z damp the pursuer's own lateral motion.
/// After the per-axis acceleration clamp, the x command is adjusted so the
/// post-step x velocity never exceeds v_max in magnitude.
inline Vec3 tracking_control(const Vec3& est_disp, const Vec3& est_rel_vel, const SvtConfig& cfg,
                             const Vec3& current_vel, double dt) {
    require_finite(est_disp, "tracking_control est_disp");
    Vec3 a;
    a.x = cfg.kp * (est_disp.x - cfg.offset) + cfg.kd * est_rel_vel.x;
    a.y = -cfg.kd * current_vel.y;
    a.z = -cfg.kd * current_vel.z;
    a = clamp_abs(a, {cfg.a_limit, cfg.a_limit, cfg.a_limit});
    const double vx_next = current_vel.x + a.x * dt;
    if (vx_next > cfg.v_max) a.x = (cfg.v_max - current_vel.x) / dt;
    else if (vx_next < -cfg.v_max) a.x = (-cfg.v_max - current_vel.x) / dt;
    return a;
}

/// A committed recovery maneuver: the pose to back off to, the absolute time
/// by which the target should have reappeared, and the pursuer x at episode
/// entry (kept across re-plans for d_max accounting).
struct RecoveryPlan {
    Vec3 x_R;
    double deadline = 0.0;        // s, absolute sim time
    double entry_pursuer_x = 0.0; // m
};

/// Recovery-pose failure: the required backoff along -x exceeds d_max.
struct BackoffExceedsDmax {
    double required_backoff = 0.0; // m
};

inline constexpr double kRecoverySphereRadiusFloor = 1e-3; // m

/// Recovery pose from the target's reach box: inscribe the box's bounding
/// sphere (center c, radius r, floored at 1 mm) in the view cone,
///   x_R = (c.x - r / sin(fov/2), c.y, c.z),
/// verify every box corner is visible from x_R, and check that the backoff
/// ref_pose.x - x_R.x stays within d_max. `now` stamps the plan deadline.
inline std::variant<RecoveryPlan, BackoffExceedsDmax>
compute_recovery_pose(const IntervalBox& reach_box, const CameraModel& cam, const Vec3& ref_pose,
                      const SvtConfig& cfg, double now = 0.0) {
    if (!reach_box.valid()) throw std::invalid_argument("compute_recovery_pose: invalid reach box");
    const auto [c, r_raw] = bounding_sphere(reach_box);
    const double r = std::max(r_raw, kRecoverySphereRadiusFloor);
    const double half = cam.fov / 2.0;
    const Vec3 x_R{c.x - r / std::sin(half), c.y, c.z};
    for (const Vec3& corner : reach_box.corners()) {
        if (!visible(x_R, corner, cam))
            throw std::logic_error("compute_recovery_pose: reach box corner not visible from x_R");
    }
    const double required = ref_pose.x - x_R.x;
    if (required > cfg.d_max) return BackoffExceedsDmax{required};
    return RecoveryPlan{x_R, now + cfg.t_R, ref_pose.x};
}

/// Recovery-mode command: PD toward x_R with the recovery gains, per-axis
/// acceleration clamp, no v_max cap.
inline Vec3 recovery_control(const KinState& p, const RecoveryPlan& plan, const SvtConfig& cfg) {
    Vec3 a = cfg.recovery_kp * (plan.x_R - p.pos) - cfg.recovery_kd * p.vel;
    return clamp_abs(a, {cfg.a_limit, cfg.a_limit, cfg.a_limit});
}

/// Definition-1 style check: simulate the recovery closed loop from p for t_R
/// and test whether the pursuer lands within 0.05 m of x_R by the deadline.
inline bool check_recoverability(const KinState& p, const RecoveryPlan& plan, const SvtConfig& cfg,
                                 double dt = 0.01) {
    KinState s = p;
    const int steps = static_cast<int>(std::llround(cfg.t_R / dt));
    for (int i = 0; i < steps; ++i)
        s = step_double_integrator(s, recovery_control(s, plan, cfg), dt);
    return (s.pos - plan.x_R).norm() <= 0.05;
}

/// Per-step event attached to the trace.
enum class StepEvent { None, Loss, Reacquire, Replan, RecoveryFailure };

inline const char* step_event_name(StepEvent e) {
    switch (e) {
    case StepEvent::None: return "";
    case StepEvent::Loss: return "loss";
    case StepEvent::Reacquire: return "reacquire";
    case StepEvent::Replan: return "replan";
    case StepEvent::RecoveryFailure: return "recovery_failure";
    }
    return "";
}

/// The switching-signal generator: current mode plus debounce and plan state.
struct SvtState {
    Mode mode = Mode::Tracking;
    int consecutive_miss = 0;
    std::optional<RecoveryPlan> plan;
    std::optional<KinState> frozen_target; // last estimate used for tracking
};

struct SvtStepResult {
    Mode mode = Mode::Tracking;
    Vec3 accel;
    StepEvent event = StepEvent::None;
};

/// One controller step. The estimator must already be predicted/updated for
/// this step by the caller.
///
/// Transition rules:
///  (a) Tracking + seen: reset debounce, tracking command from the fresh estimate.
///  (b) Tracking + miss: after debounce_n consecutive misses, plan a recovery
///      pose from the current estimate boxes and switch; inside the window,
///      keep tracking against the frozen estimate.
///  (c) Recovery + seen: switch to Tracking immediately (stable-mode entry).
///  (d) Recovery + miss: drive toward x_R; at deadline expiry re-plan from the
///      propagated reach set, same episode for d_max accounting.
/// A plan rejected by the d_max check records a recovery_failure event and the
/// pursuer brakes to a hover instead of backing off.
inline SvtStepResult svt_step(SvtState& st, const ObserverOutput& obs,
                              const TargetEstimator& estimator, const KinState& p,
                              const SvtConfig& cfg, const CameraModel& cam, double now,
                              double dt) {
    SvtStepResult out;

    const auto track_from = [&](const KinState& target) {
        return tracking_control(target.pos - p.pos, target.vel - p.vel, cfg, p.vel, dt);
    };
    const auto plan_recovery = [&](const Vec3& ref_pose) {
        const TargetEstimate est = estimator.estimate();
        const IntervalBox rbox =
            reach_position_box(est.pos_box, est.vel_box, {cfg.target_a_max, cfg.t_R});
        return compute_recovery_pose(rbox, cam, ref_pose, cfg, now);
    };

    if (st.mode == Mode::Tracking) {
        if (obs.seen()) {
            st.consecutive_miss = 0;
            const TargetEstimate est = estimator.estimate();
            st.frozen_target = KinState{est.pos, est.vel};
            out.accel = track_from(*st.frozen_target);
        } else {
            ++st.consecutive_miss;
            if (st.consecutive_miss >= cfg.debounce_n && estimator.initialized()) {
                auto res = plan_recovery(p.pos);
                if (auto* plan = std::get_if<RecoveryPlan>(&res)) {
                    st.mode = Mode::Recovery;
                    st.plan = *plan;
                    out.accel = recovery_control(p, *st.plan, cfg);
                    out.event = StepEvent::Loss;
                } else {
                    out.accel = hover_brake(p.vel, cfg);
                    out.event = StepEvent::RecoveryFailure;
                }
            } else if (st.frozen_target) {
                out.accel = track_from(*st.frozen_target);
            } else {
                // lost before anything was ever seen; hold
                out.accel = hover_brake(p.vel, cfg);
            }
        }
    } else {
        if (obs.seen()) {
            st.mode = Mode::Tracking;
            st.consecutive_miss = 0;
            st.plan.reset();
            const TargetEstimate est = estimator.estimate();
            st.frozen_target = KinState{est.pos, est.vel};
            out.accel = track_from(*st.frozen_target);
            out.event = StepEvent::Reacquire;
        } else {
            if (now > st.plan->deadline) {
                Vec3 ref = p.pos;
                ref.x = st.plan->entry_pursuer_x;
                auto res = plan_recovery(ref);
                if (auto* plan = std::get_if<RecoveryPlan>(&res)) {
                    st.plan = *plan;
                    out.event = StepEvent::Replan;
                } else {
                    st.plan->deadline = now + cfg.t_R; // retry one horizon later
                    out.event = StepEvent::RecoveryFailure;
                }
            }
            out.accel = recovery_control(p, *st.plan, cfg);
        }
    }
    out.mode = st.mode;
    return out;
}

/// Comparison controller: follow when seen, brake to a hover when not.
inline Vec3 baseline_step(const ObserverOutput& obs, const TargetEstimator& estimator,
                          const KinState& p, const SvtConfig& cfg, double dt) {
    if (obs.seen()) {
        const TargetEstimate est = estimator.estimate();
        return tracking_control(est.pos - p.pos, est.vel - p.vel, cfg, p.vel, dt);
    }
    return hover_brake(p.vel, cfg);
}

} // namespace svt
