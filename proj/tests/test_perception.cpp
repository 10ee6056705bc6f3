#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "svt/perception.hpp"

using namespace svt;
using Catch::Approx;

namespace {

const CameraModel kCam{}; // 70 deg full angle, facing +x

double cone_angle(const Vec3& p, const Vec3& t, const CameraModel& cam) {
    const Vec3 V = t - p;
    return std::atan2(cross(V, cam.facing).norm(), dot(V, cam.facing));
}

} // namespace

TEST_CASE("visibility basics", "[perception][visible]") {
    CHECK(visible({0, 0, 0}, {1, 0, 0}, kCam));
    CHECK_FALSE(visible({0, 0, 0}, {-1, 0, 0}, kCam));
    CHECK_FALSE(visible({0, 0, 0}, {0, 0, 0}, kCam)); // coincident -> not visible

    const double t35 = std::tan(35.0 * M_PI / 180.0);
    CHECK(visible({0, 0, 0}, {1.0, t35, 0.0}, kCam)); // boundary counts
    CHECK_FALSE(visible({0, 0, 0}, {1.0, t35 + 1e-6, 0.0}, kCam));
}

TEST_CASE("visibility agrees with the atan2 angle oracle", "[perception][visible][oracle]") {
    Rng rng(31415);
    const double half = kCam.fov / 2.0;
    std::size_t checked = 0, mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p{rng.uniform(0, 5.6), rng.uniform(-2.7, 2.7), rng.uniform(0, 3)};
        const Vec3 t{rng.uniform(0, 5.6), rng.uniform(-2.7, 2.7), rng.uniform(0, 3)};
        const double ang = cone_angle(p, t, kCam);
        if (std::abs(ang - half) < 1e-9) continue; // boundary band excluded
        ++checked;
        const bool oracle = (t - p).norm() > 0.0 && ang <= half;
        if (visible(p, t, kCam) != oracle) ++mismatches;
    }
    CHECK(mismatches == 0);
    CHECK(checked > 9000);
}

TEST_CASE("visibility is invariant under rigid translation", "[perception][visible][property]") {
    Rng rng(2718);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const Vec3 t{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const Vec3 shift{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        CHECK(visible(p, t, kCam) == visible(p + shift, t + shift, kCam));
    }
}

TEST_CASE("noiseless observer returns the exact displacement", "[perception][observe]") {
    Rng rng(1);
    const KinState p{{1, 0, 1}, {}};
    const KinState t{{3, 0.5, 1.2}, {}};
    const ObserverOutput out = observe(p, t, kCam, NoiseModel{}, rng);
    REQUIRE(out.seen());
    CHECK((*out.displacement - (t.pos - p.pos)).norm() == Approx(0.0).margin(1e-15));
}

TEST_CASE("geometry dominates noise: invisible stays invisible", "[perception][observe]") {
    Rng rng(2);
    NoiseModel noisy;
    noisy.pos_sigma = {5, 5, 5};
    const KinState p{{1, 0, 1}, {}};
    const KinState t{{-3, 0.5, 1.2}, {}};
    CHECK_FALSE(observe(p, t, kCam, noisy, rng).seen());
}

TEST_CASE("dropout sequence is seed-reproducible", "[perception][observe][determinism]") {
    NoiseModel drop;
    drop.dropout_prob = 0.5;
    const KinState p{{1, 0, 1}, {}};
    const KinState t{{3, 0.2, 1.1}, {}};
    auto run = [&]() {
        Rng rng(42);
        std::vector<bool> hits;
        for (int i = 0; i < 200; ++i) hits.push_back(observe(p, t, kCam, drop, rng).seen());
        return hits;
    };
    const auto a = run();
    const auto b = run();
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), true) > 50);
    CHECK(std::count(a.begin(), a.end(), false) > 50);
}

TEST_CASE("kalman predict propagates the mean linearly", "[perception][kalman]") {
    KalmanAxis kf;
    kf.p = 0.0;
    kf.v = 1.0;
    const KalmanAxis out = kf_predict(kf, 0.01);
    CHECK(out.p == Approx(0.01));
    CHECK(out.v == Approx(1.0));
}

TEST_CASE("kalman predict without process noise keeps a zero covariance",
          "[perception][kalman]") {
    KalmanAxis kf;
    kf.q = 0.0;
    kf.ppp = kf.ppv = kf.pvv = 0.0;
    const KalmanAxis out = kf_predict(kf, 0.01);
    CHECK(out.ppp == 0.0);
    CHECK(out.ppv == 0.0);
    CHECK(out.pvv == 0.0);
}

TEST_CASE("kalman predict grows the covariance trace when q > 0", "[perception][kalman]") {
    KalmanAxis kf;
    kf.q = 2.0;
    const KalmanAxis out = kf_predict(kf, 0.01);
    CHECK(out.ppp + out.pvv > kf.ppp + kf.pvv);
}

TEST_CASE("kalman update limits", "[perception][kalman]") {
    KalmanAxis kf;
    kf.p = 1.0;
    kf.v = 0.3;

    KalmanAxis sharp = kf;
    sharp.r = 1e-12;
    CHECK(kf_update(sharp, 2.0).p == Approx(2.0).margin(1e-6));

    KalmanAxis blunt = kf;
    blunt.r = 1e12;
    CHECK(kf_update(blunt, 2.0).p == Approx(1.0).margin(1e-6));
    CHECK(kf_update(blunt, 2.0).v == Approx(0.3).margin(1e-6));
}

TEST_CASE("static target drives the velocity estimate to zero", "[perception][kalman]") {
    KalmanAxis kf;
    kf.p = 5.0;
    kf.v = 0.0;
    const double dt = 0.01;
    double sx = 0, sy = 0, sxx = 0, sxy = 0; // least-squares oracle over measurements
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        kf = kf_update(kf_predict(kf, dt), 5.0);
        const double t = (i + 1) * dt;
        sx += t; sy += 5.0; sxx += t * t; sxy += t * 5.0;
    }
    const double ls_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(kf.v) < 0.01);
    CHECK(std::abs(kf.v - ls_slope) < 0.01);
}

TEST_CASE("covariance stays symmetric PSD over random predict/update cycles",
          "[perception][kalman][property]") {
    Rng rng(555);
    KalmanAxis kf;
    double min_eig = 1e300;
    for (int i = 0; i < 10000; ++i) {
        kf = kf_predict(kf, 0.01);
        if (rng.bernoulli(0.7)) kf = kf_update(kf, rng.uniform(-10, 10));
        const double tr = kf.ppp + kf.pvv;
        const double det = kf.ppp * kf.pvv - kf.ppv * kf.ppv;
        const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        min_eig = std::min(min_eig, (tr - disc) / 2.0);
    }
    CHECK(min_eig >= -1e-10);
}

TEST_CASE("estimator boxes are centered on the mean with n_sigma half-widths",
          "[perception][estimator]") {
    TargetEstimator::Params prm;
    prm.init_pos_var = 0.01;
    prm.init_vel_var = 4.0;
    prm.n_sigma = 3.0;
    TargetEstimator est(prm);
    CHECK_THROWS_AS(est.estimate(), std::logic_error);

    est.update({1.0, -2.0, 0.5}); // first measurement initializes
    const TargetEstimate e = est.estimate();
    CHECK(e.pos == Vec3{1.0, -2.0, 0.5});
    CHECK(e.vel == Vec3{0.0, 0.0, 0.0});
    CHECK(e.pos_box.hi.y - e.pos_box.lo.y == Approx(2.0 * 3.0 * 0.1));
    CHECK(e.vel_box.hi.x - e.vel_box.lo.x == Approx(2.0 * 3.0 * 2.0));
    CHECK(e.pos_box.contains(e.pos));
    CHECK(e.vel_box.contains(e.vel));

    TargetEstimator::Params degenerate;
    degenerate.init_pos_var = 0.0;
    degenerate.init_vel_var = 0.0;
    TargetEstimator point(degenerate);
    point.update({2.0, 0.0, 1.0});
    const TargetEstimate pe = point.estimate();
    CHECK(pe.pos_box.lo == pe.pos_box.hi);
    CHECK(pe.vel_box.lo == pe.vel_box.hi);
}

TEST_CASE("estimator tracks a constant-velocity target", "[perception][estimator]") {
    TargetEstimator est;
    const double dt = 0.01;
    for (int i = 0; i <= 200; ++i) {
        const double t = i * dt;
        const Vec3 z{0.0, 0.5 * t, 0.0}; // 0.5 m/s along y, noiseless
        if (!est.initialized()) est.update(z);
        else {
            est.predict(dt);
            est.update(z);
        }
    }
    const TargetEstimate e = est.estimate();
    CHECK(e.vel.y == Approx(0.5).epsilon(0.01));
}
