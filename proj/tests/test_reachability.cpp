#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "svt/reachability.hpp"

using namespace svt;
using Catch::Approx;

TEST_CASE("reach box closed form on the worked example", "[reachability]") {
    const IntervalBox pos0 = IntervalBox::point({0, 0, 0});
    const IntervalBox vel0 = IntervalBox::point({1, 0, 0});
    const IntervalBox out = reach_position_box(pos0, vel0, {2.0, 1.5});
    CHECK(out.lo.x == Approx(-0.75));
    CHECK(out.hi.x == Approx(3.75));
    CHECK(out.lo.y == Approx(-2.25));
    CHECK(out.hi.y == Approx(2.25));
}

TEST_CASE("reach box degenerates to the initial set", "[reachability]") {
    const IntervalBox pos0{{1, 2, 3}, {1.5, 2, 3}};
    const IntervalBox still = reach_position_box(pos0, IntervalBox::point({0, 0, 0}), {0.0, 1.5});
    CHECK(still.lo == pos0.lo);
    CHECK(still.hi == pos0.hi);
    const IntervalBox frozen = reach_position_box(pos0, IntervalBox::point({4, -1, 2}), {2.0, 0.0});
    CHECK(frozen.lo == pos0.lo);
    CHECK(frozen.hi == pos0.hi);
}

TEST_CASE("bounding sphere", "[reachability]") {
    const auto [c0, r0] = bounding_sphere(IntervalBox::point({1, 2, 3}));
    CHECK(c0 == Vec3{1, 2, 3});
    CHECK(r0 == 0.0);

    const auto [c1, r1] = bounding_sphere({{0, 0, 0}, {1, 1, 1}});
    CHECK(c1 == Vec3{0.5, 0.5, 0.5});
    CHECK(r1 == Approx(std::sqrt(3.0) / 2.0));

    const auto [c2, r2] = bounding_sphere({{-0.75, 0, 1.5}, {3.75, 0, 1.5}});
    CHECK(c2 == Vec3{1.5, 0, 1.5});
    CHECK(r2 == Approx(2.25));
}

TEST_CASE("monte carlo rollouts stay inside the reach box and attain its extremes",
          "[reachability][oracle]") {
    Rng rng(20240917);
    for (int cfg = 0; cfg < 3; ++cfg) {
        const Vec3 pos0{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vec3 vel0{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const ReachParams prm{rng.uniform(0.5, 3.0), rng.uniform(0.5, 2.0)};
        const IntervalBox box =
            reach_position_box(IntervalBox::point(pos0), IntervalBox::point(vel0), prm);

        const auto samples = mc_reach_samples(pos0, vel0, prm, 10000, rng);
        REQUIRE(samples.size() == 10000);
        Vec3 lo = samples[0], hi = samples[0];
        std::size_t violations = 0;
        for (const Vec3& s : samples) {
            if (!box.contains(s, 1e-9)) ++violations;
            lo = {std::min(lo.x, s.x), std::min(lo.y, s.y), std::min(lo.z, s.z)};
            hi = {std::max(hi.x, s.x), std::max(hi.y, s.y), std::max(hi.z, s.z)};
        }
        CHECK(violations == 0);
        // saturated samples 0/1 attain the per-axis extremes
        CHECK(hi.x == Approx(box.hi.x).margin(1e-9));
        CHECK(hi.y == Approx(box.hi.y).margin(1e-9));
        CHECK(hi.z == Approx(box.hi.z).margin(1e-9));
        CHECK(lo.x == Approx(box.lo.x).margin(1e-9));
        CHECK(lo.y == Approx(box.lo.y).margin(1e-9));
        CHECK(lo.z == Approx(box.lo.z).margin(1e-9));
    }
}

TEST_CASE("sample cloud with zero initial velocity is symmetric about pos0",
          "[reachability][oracle]") {
    Rng rng(7);
    const Vec3 pos0{1.0, -2.0, 0.5};
    const auto samples = mc_reach_samples(pos0, {0, 0, 0}, {2.0, 1.0}, 20000, rng);
    Vec3 mean{};
    for (const Vec3& s : samples) mean += s - pos0;
    mean = mean / static_cast<double>(samples.size());
    CHECK(std::abs(mean.x) < 0.05);
    CHECK(std::abs(mean.y) < 0.05);
    CHECK(std::abs(mean.z) < 0.05);
}

namespace {

bool box_leq(const IntervalBox& a, const IntervalBox& b) {
    return b.lo.x <= a.lo.x && b.lo.y <= a.lo.y && b.lo.z <= a.lo.z &&
           b.hi.x >= a.hi.x && b.hi.y >= a.hi.y && b.hi.z >= a.hi.z;
}

} // namespace

TEST_CASE("reach box is monotone in pos0, vel0 and a_max", "[reachability][property]") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 pc{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const Vec3 ph{rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)};
        const Vec3 vc{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const Vec3 vh{rng.uniform(0, 0.5), rng.uniform(0, 0.5), rng.uniform(0, 0.5)};
        const IntervalBox pos0{pc - ph, pc + ph};
        const IntervalBox vel0{vc - vh, vc + vh};
        const ReachParams prm{rng.uniform(0.1, 3.0), rng.uniform(0.1, 2.0)};
        const IntervalBox base = reach_position_box(pos0, vel0, prm);

        const Vec3 grow{0.1, 0.2, 0.05};
        CHECK(box_leq(base, reach_position_box({pos0.lo - grow, pos0.hi + grow}, vel0, prm)));
        CHECK(box_leq(base, reach_position_box(pos0, {vel0.lo - grow, vel0.hi + grow}, prm)));
        CHECK(box_leq(base, reach_position_box(pos0, vel0, {prm.a_max + 0.5, prm.t_R})));
    }
}

// Growing the horizon never shrinks the box when the velocity box straddles
// zero (the interval endpoints then move outward: d hi/dt = v_hi + a t >= 0,
// d lo/dt = v_lo - a t <= 0). A velocity box strictly away from zero shifts
// the reach interval instead, so the unrestricted claim would be false.
TEST_CASE("reach box is monotone in t_R for zero-straddling velocity boxes",
          "[reachability][property]") {
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 pc{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const Vec3 ph{rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)};
        const Vec3 vh{rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0)};
        const Vec3 vc{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
        const IntervalBox pos0{pc - ph, pc + ph};
        const IntervalBox vel0{vc - vh, vc + vh};
        const ReachParams prm{rng.uniform(0.1, 3.0), rng.uniform(0.1, 2.0)};
        const IntervalBox base = reach_position_box(pos0, vel0, prm);
        CHECK(box_leq(base, reach_position_box(pos0, vel0, {prm.a_max, prm.t_R + 0.3})));
    }
}
