#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "svt/reachability.hpp"
#include "svt/rng.hpp"
#include "svt/sim_core.hpp"
#include "svt/vec3.hpp"

namespace svt {

/// Pinhole-free camera abstraction: a visibility cone with full apex angle
/// `fov` around the fixed `facing` axis.
struct CameraModel {
    double fov = 70.0 * M_PI / 180.0; // radians, full angle
    Vec3 facing{1.0, 0.0, 0.0};       // unit vector

    bool valid() const {
        return fov > 0.0 && fov < M_PI && std::abs(facing.norm() - 1.0) < 1e-9;
    }
};

/// Cone test with the half angle fov/2: with V = t_pos - p_pos and R = facing,
/// visible iff V.R > 0 and |V x R| <= (V.R) tan(fov/2). The boundary counts as
/// visible; a coincident target (V = 0) does not (V.R > 0 fails at equality).
inline bool visible(const Vec3& p_pos, const Vec3& t_pos, const CameraModel& cam) {
    const Vec3 V = t_pos - p_pos;
    const double along = dot(V, cam.facing);
    if (!(along > 0.0)) return false;
    const double lateral = cross(V, cam.facing).norm();
    return lateral <= along * std::tan(cam.fov / 2.0);
}

/// Observer output: the displacement x_T - x_P when the target was seen,
/// nothing otherwise.
struct ObserverOutput {
    std::optional<Vec3> displacement;

    bool seen() const { return displacement.has_value(); }
};

/// Additive Gaussian noise on the displacement plus i.i.d. dropout. Stands in
/// for marker-detection error; dropout_prob = 1 is forbidden (the observer
/// would never report).
struct NoiseModel {
    Vec3 pos_sigma{0.0, 0.0, 0.0}; // m, per axis
    double dropout_prob = 0.0;

    bool valid() const {
        return pos_sigma.x >= 0 && pos_sigma.y >= 0 && pos_sigma.z >= 0 &&
               dropout_prob >= 0.0 && dropout_prob < 1.0;
    }
};

/// One observation: geometric visibility gate, then dropout, then noise.
inline ObserverOutput observe(const KinState& p, const KinState& t, const CameraModel& cam,
                              const NoiseModel& noise, Rng& rng) {
    if (!visible(p.pos, t.pos, cam)) return {};
    if (noise.dropout_prob > 0.0 && rng.bernoulli(noise.dropout_prob)) return {};
    Vec3 d = t.pos - p.pos;
    if (noise.pos_sigma.x > 0.0) d.x += rng.gaussian(0.0, noise.pos_sigma.x);
    if (noise.pos_sigma.y > 0.0) d.y += rng.gaussian(0.0, noise.pos_sigma.y);
    if (noise.pos_sigma.z > 0.0) d.z += rng.gaussian(0.0, noise.pos_sigma.z);
    return {d};
}

/// Scalar constant-velocity Kalman filter for one axis: state (position,
/// velocity), white-acceleration process noise of std dev q, position
/// measurements of std dev r.
struct KalmanAxis {
    double p = 0.0;   // position mean, m
    double v = 0.0;   // velocity mean, m/s
    // covariance entries (symmetric 2x2)
    double ppp = 0.25;
    double ppv = 0.0;
    double pvv = 1.0;
    double q = 2.0;   // m/s^2
    double r = 0.02;  // m
};

/// Propagate mean and covariance by dt under the constant-velocity model.
inline KalmanAxis kf_predict(const KalmanAxis& kf, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("kf_predict: dt must be > 0");
    KalmanAxis out = kf;
    out.p = kf.p + kf.v * dt;
    // P' = F P F^T + Q, F = [[1,dt],[0,1]], Q = q^2 [[dt^4/4, dt^3/2],[dt^3/2, dt^2]]
    const double q2 = kf.q * kf.q;
    out.ppp = kf.ppp + 2.0 * dt * kf.ppv + dt * dt * kf.pvv + q2 * dt * dt * dt * dt / 4.0;
    out.ppv = kf.ppv + dt * kf.pvv + q2 * dt * dt * dt / 2.0;
    out.pvv = kf.pvv + q2 * dt * dt;
    return out;
}

/// Scalar position update, Joseph form (keeps the covariance PSD).
inline KalmanAxis kf_update(const KalmanAxis& kf, double z) {
    if (!std::isfinite(z)) throw std::invalid_argument("kf_update: non-finite measurement");
    const double s = kf.ppp + kf.r * kf.r;
    const double kp = kf.ppp / s;
    const double kv = kf.ppv / s;
    KalmanAxis out = kf;
    const double innov = z - kf.p;
    out.p = kf.p + kp * innov;
    out.v = kf.v + kv * innov;
    // P' = (I-KH) P (I-KH)^T + K R K^T with H = [1, 0]
    const double a = 1.0 - kp;
    const double r2 = kf.r * kf.r;
    out.ppp = a * a * kf.ppp + kp * kp * r2;
    out.ppv = a * (kf.ppv - kv * kf.ppp) + kp * kv * r2;
    out.pvv = kf.pvv - 2.0 * kv * kf.ppv + kv * kv * kf.ppp + kv * kv * r2;
    return out;
}

/// Point estimate plus the +-n_sigma interval boxes handed to reachability.
struct TargetEstimate {
    Vec3 pos;
    Vec3 vel;
    IntervalBox pos_box;
    IntervalBox vel_box;
};

/// Three decoupled per-axis filters tracking the target in world coordinates.
class TargetEstimator {
public:
    struct Params {
        double q = 2.0;        // process accel sigma, m/s^2
        double r = 0.02;       // measurement sigma, m
        double n_sigma = 3.0;  // half-width of the estimate boxes, in std devs
        double init_pos_var = 0.25;
        double init_vel_var = 1.0;
    };

    TargetEstimator() = default;
    explicit TargetEstimator(const Params& prm) : prm_(prm) {}

    bool initialized() const { return initialized_; }

    /// First measurement initializes mean = (z, 0) with the configured prior.
    void init(const Vec3& z) {
        const double axes_z[3] = {z.x, z.y, z.z};
        for (int i = 0; i < 3; ++i) {
            axes_[i] = KalmanAxis{axes_z[i], 0.0, prm_.init_pos_var, 0.0, prm_.init_vel_var,
                                  prm_.q, prm_.r};
        }
        initialized_ = true;
    }

    void predict(double dt) {
        if (!initialized_) return;
        for (auto& a : axes_) a = kf_predict(a, dt);
    }

    void update(const Vec3& z) {
        if (!initialized_) { init(z); return; }
        axes_[0] = kf_update(axes_[0], z.x);
        axes_[1] = kf_update(axes_[1], z.y);
        axes_[2] = kf_update(axes_[2], z.z);
    }

    /// Mean and +-n_sigma boxes; requires an initialized filter.
    TargetEstimate estimate() const {
        if (!initialized_) throw std::logic_error("TargetEstimator::estimate: not initialized");
        TargetEstimate e;
        e.pos = {axes_[0].p, axes_[1].p, axes_[2].p};
        e.vel = {axes_[0].v, axes_[1].v, axes_[2].v};
        const Vec3 hp{prm_.n_sigma * std::sqrt(std::max(0.0, axes_[0].ppp)),
                      prm_.n_sigma * std::sqrt(std::max(0.0, axes_[1].ppp)),
                      prm_.n_sigma * std::sqrt(std::max(0.0, axes_[2].ppp))};
        const Vec3 hv{prm_.n_sigma * std::sqrt(std::max(0.0, axes_[0].pvv)),
                      prm_.n_sigma * std::sqrt(std::max(0.0, axes_[1].pvv)),
                      prm_.n_sigma * std::sqrt(std::max(0.0, axes_[2].pvv))};
        e.pos_box = {e.pos - hp, e.pos + hp};
        e.vel_box = {e.vel - hv, e.vel + hv};
        return e;
    }

    const KalmanAxis& axis(int i) const { return axes_.at(i); }

private:
    Params prm_;
    std::array<KalmanAxis, 3> axes_{};
    bool initialized_ = false;
};

} // namespace svt
