#include <doctest.h>

#include <array>
#include <cmath>

#include "katoklab/errors.hpp"
#include "katoklab/flow.hpp"
#include "katoklab/params.hpp"
#include "katoklab/rng.hpp"

using namespace katoklab;

namespace {

// fixed-step classical RK4 oracle, independent of the adaptive integrator
Vec2 rk4_oracle(const SlowFlow& fl, Vec2 s, double T, double h) {
    long n = std::lround(T / h);
    for (long i = 0; i < n; ++i) {
        Vec2 k1 = fl.field(s);
        Vec2 k2 = fl.field(s + 0.5 * h * k1);
        Vec2 k3 = fl.field(s + 0.5 * h * k2);
        Vec2 k4 = fl.field(s + h * k3);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return s;
}

Vec2 random_in_disk(CounterRng& rng, double r) {
    double rr = std::sqrt(r * rng.next_double());
    double th = 2 * M_PI * rng.next_double();
    return {rr * std::cos(th), rr * std::sin(th)};
}

} // namespace

TEST_CASE("flow fixes the origin and the pure-scaling region") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);

    Vec2 z = fl.flow({0, 0}, 5.0);
    CHECK(z.norm() == 0.0);

    // outside the slow-down disk the time-1 map is the linear scaling;
    // pick a start whose whole forward orbit stays outside
    Vec2 s0{0.4, 0.05};
    CHECK(s0.norm2() > P.r0());
    Vec2 s1 = fl.flow(s0, 1.0, 9.0);
    CHECK(s1.x == doctest::Approx(P.lambda() * s0.x).epsilon(1e-11));
    CHECK(s1.y == doctest::Approx(s0.y / P.lambda()).epsilon(1e-11));
}

TEST_CASE("flow matches a fine-step RK4 oracle") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);
    Vec2 s0{0.03, 0.04};
    Vec2 got = fl.flow(s0, 1.0);
    Vec2 want = rk4_oracle(fl, s0, 1.0, 1e-5);
    CHECK((got - want).norm() < 1e-8);
}

TEST_CASE("conservation, semigroup and reversibility") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);
    CounterRng rng(P.rng_seed(), 2);
    for (int i = 0; i < 200; ++i) {
        Vec2 s0 = random_in_disk(rng, P.r0());
        double t1 = 0.3 + 2.0 * rng.next_double();
        double t2 = 0.3 + 2.0 * rng.next_double();
        Vec2 a, b, c;
        try {
            a = fl.flow(s0, t1 + t2, 9.0);
            b = fl.flow(fl.flow(s0, t1, 9.0), t2, 9.0);
            c = fl.flow(a, -(t1 + t2), 9.0);
        } catch (const ChartExitError&) {
            continue;
        }
        CHECK((a - b).norm() < 1e-9 * (1.0 + a.norm()));
        CHECK((c - s0).norm() < 1e-9);
        double prod0 = s0.x * s0.y, prod1 = a.x * a.y;
        CHECK(std::fabs(prod1 - prod0) / std::max(std::fabs(prod0), 1e-30) < 1e-9);
    }
}

TEST_CASE("first-quadrant monotonicity") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);
    Vec2 s{0.02, 0.15};
    double prev1 = s.x, prev2 = s.y;
    for (int k = 1; k <= 20; ++k) {
        Vec2 z = fl.flow(s, 0.1 * k, 9.0);
        CHECK(z.x >= prev1 - 1e-12);
        CHECK(z.y <= prev2 + 1e-12);
        prev1 = z.x;
        prev2 = z.y;
    }
}

TEST_CASE("variational matrix values and finite-difference consistency") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);

    Mat2 at0 = fl.variational_matrix({0, 0});
    CHECK(at0.norm_inf() == 0.0);

    Mat2 out = fl.variational_matrix({0.3, 0.3}); // u = 0.18 >= r0
    CHECK(out.a == doctest::Approx(P.log_lambda()).epsilon(1e-13));
    CHECK(out.d == doctest::Approx(-P.log_lambda()).epsilon(1e-13));
    CHECK(out.b == 0.0);
    CHECK(out.c == 0.0);

    // finite differences of the vector field pin all four entries (and in
    // particular the sign of the (2,2) entry)
    CounterRng rng(P.rng_seed(), 3);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        Vec2 s = random_in_disk(rng, P.r0() * 0.9);
        if (s.norm2() < 1e-6) continue;
        double h = 1e-6;
        Mat2 D = fl.variational_matrix(s);
        Vec2 fx1 = fl.field({s.x + h, s.y}), fx0 = fl.field({s.x - h, s.y});
        Vec2 fy1 = fl.field({s.x, s.y + h}), fy0 = fl.field({s.x, s.y - h});
        Mat2 FD((fx1.x - fx0.x) / (2 * h), (fy1.x - fy0.x) / (2 * h),
                (fx1.y - fx0.y) / (2 * h), (fy1.y - fy0.y) / (2 * h));
        worst = std::max(worst, (D - FD).norm_inf());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("jacobian transport matches finite differences") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);

    // pure-scaling region
    auto [s_out, J_out] = fl.flow_with_jacobian({0.4, 0.05}, 1.0, 9.0);
    (void)s_out;
    CHECK(J_out.a == doctest::Approx(P.lambda()).epsilon(1e-10));
    CHECK(J_out.d == doctest::Approx(1.0 / P.lambda()).epsilon(1e-10));

    auto [z, Jz] = fl.flow_with_jacobian({0, 0}, 3.0);
    (void)z;
    CHECK((Jz - Mat2::identity()).norm_inf() == 0.0);

    // the finite-difference oracle divides the integrator error by the
    // step, so it runs at a tighter tolerance than the default
    KatokParams Pt(0.5, 0.1, 1e-13);
    SlowFlow flt(Pt);
    CounterRng rng(P.rng_seed(), 4);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        Vec2 s = random_in_disk(rng, P.r0() / 2);
        if (s.norm2() < 1e-5) continue;
        auto [img, J] = flt.flow_with_jacobian(s, 1.0, 9.0);
        (void)img;
        // h balances FD truncation against integrator noise (~tol/h)
        double h = 1e-6;
        Vec2 px1 = flt.flow({s.x + h, s.y}, 1.0, 9.0), px0 = flt.flow({s.x - h, s.y}, 1.0, 9.0);
        Vec2 py1 = flt.flow({s.x, s.y + h}, 1.0, 9.0), py0 = flt.flow({s.x, s.y - h}, 1.0, 9.0);
        Mat2 FD((px1.x - px0.x) / (2 * h), (py1.x - py0.x) / (2 * h),
                (px1.y - px0.y) / (2 * h), (py1.y - py0.y) / (2 * h));
        worst = std::max(worst, (J - FD).norm_inf() / std::max(1.0, J.norm_inf()));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("slope advection agrees with the variational quotient") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);

    // invariant axis: eta stays zero
    CHECK(fl.eta_flow({0.02, 0.0}, 0.0, 1.0, 9.0) == doctest::Approx(0.0));

    CounterRng rng(P.rng_seed(), 5);
    for (int i = 0; i < 50; ++i) {
        Vec2 s = random_in_disk(rng, P.r0() * 0.9);
        if (s.norm2() < 1e-6) continue;
        double eta0 = -0.9 + 1.8 * rng.next_double();
        double eta1;
        try {
            eta1 = fl.eta_flow(s, eta0, 1.0, 9.0);
        } catch (const BlowupError&) {
            continue;
        }
        auto [img, J] = fl.flow_with_jacobian(s, 1.0, 9.0);
        (void)img;
        Vec2 v = J * Vec2{1.0, eta0};
        CHECK(std::fabs(eta1 - v.y / v.x) < 1e-7);
    }
}

TEST_CASE("chart exit raises") {
    KatokParams P(0.5, 0.1);
    SlowFlow fl(P);
    Vec2 start{0.3, 0.01};
    CHECK_THROWS_AS(fl.flow(start, 3.0), ChartExitError);
}
