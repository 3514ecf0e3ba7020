#include <doctest.h>

#include <cmath>

#include "katoklab/katok.hpp"
#include "katoklab/rng.hpp"

using namespace katoklab;

namespace {
TorusPoint random_point(CounterRng& rng) {
    return TorusPoint(rng.next_double(), rng.next_double());
}

TorusPoint random_in_disk(CounterRng& rng, double r) {
    double rr = std::sqrt(r * rng.next_double());
    double th = 2 * M_PI * rng.next_double();
    return TorusPoint(rr * std::cos(th), rr * std::sin(th));
}
} // namespace

TEST_CASE("slowed automorphism: branches and fixed point") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);

    MapEvaluation at0 = K.apply_G(TorusPoint(0, 0));
    CHECK(at0.image.x == 0.0);
    CHECK(at0.image.y == 0.0);
    CHECK((at0.jacobian - Mat2::identity()).norm_inf() == 0.0);

    MapEvaluation lin = K.apply_G(TorusPoint(0.25, 0.25));
    CHECK(lin.branch == Branch::linear);
    CHECK(lin.image.x == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(lin.image.y == doctest::Approx(0.50).epsilon(1e-15));

    MapEvaluation slow = K.apply_G(TorusPoint(0.05, 0.05));
    CHECK(slow.branch == Branch::slowdown);
}

TEST_CASE("slowed automorphism inverts") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);
    CounterRng rng(P.rng_seed(), 11);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        TorusPoint p = random_point(rng);
        MapEvaluation fwd = K.apply_G(p);
        MapEvaluation back = K.apply_G_inv(fwd.image);
        worst = std::max(worst, torus_distance(back.image, p));
        // jacobians compose to the identity
        CHECK(((fwd.jacobian * back.jacobian).norm_inf()) == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("branch formulas agree where orbits graze the disk") {
    // On the outflow side of the boundary the unit-time orbit only grazes
    // the slow-down region, so the flow evaluation and the linear formula
    // must coincide; the slowdown branch hands over to the linear branch
    // continuously there.
    KatokParams P(0.5, 0.1);
    KatokMap K(P);
    SlowFlow fl(P);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        // angles in the eigen chart with |s1| >= |s2| (outflow sector)
        double phi = -M_PI / 4 + (M_PI / 2) * (i + 0.5) / 200;
        for (double off : {-1e-6, 0.0, 1e-6}) {
            double rr = std::sqrt(P.r0()) * (1.0 + off);
            Vec2 s{rr * std::cos(phi), rr * std::sin(phi)};
            Vec2 c = s.x * eigen_unstable() + s.y * eigen_stable();
            TorusPoint p = torus_from_plane(c);
            TorusPoint lin(2 * p.x + p.y, p.x + p.y);
            Vec2 s1 = fl.flow(s, 1.0, 9.0);
            TorusPoint viaflow =
                torus_from_plane(s1.x * eigen_unstable() + s1.y * eigen_stable());
            worst = std::max(worst, torus_distance(lin, viaflow));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("map is continuous across the influence-zone boundary") {
    // Pairs straddling the branch decision sit on either side of the
    // critical hyperbola 2 s1 s2 = r0 just upstream of the closest
    // approach; their images must stay as close as the inputs.
    KatokParams P(0.5, 0.1);
    KatokMap K(P);
    Vec2 eu = eigen_unstable(), es = eigen_stable();
    double worst = 0;
    int straddles = 0;
    for (int k = 0; k < 100; ++k) {
        double d = 0.05 + 0.5 * k / 100.0;
        double v = std::sqrt(P.r0() / 2.0);
        Vec2 base{v * std::exp(-d), v * std::exp(d)};
        double eps = 5e-8;
        Vec2 inner = base * (1.0 - eps), outer = base * (1.0 + eps);
        TorusPoint pi = torus_from_plane(inner.x * eu + inner.y * es);
        TorusPoint po = torus_from_plane(outer.x * eu + outer.y * es);
        MapEvaluation ei = K.apply_G(pi), eo = K.apply_G(po);
        if (ei.branch != eo.branch) ++straddles;
        double din = torus_distance(pi, po);
        worst = std::max(worst, torus_distance(ei.image, eo.image) / din);
    }
    CHECK(straddles > 10);
    // image displacement stays of the order of the input displacement
    CHECK(worst < 50.0);
}

TEST_CASE("radial change: values, closed form, inverse") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);

    // identity outside the disk
    TorusPoint out(0.25, 0.25);
    CHECK(torus_distance(K.phi(out), out) == 0.0);

    // fixes the center
    TorusPoint z = K.phi(TorusPoint(0, 0));
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);

    // closed-form radial scale below r0/2: with the disk-preserving
    // normalizer, |phi(s)|^2 = I(u)/phi_norm and I(u) = r0^a u^{1-a}/(1-a)
    TorusPoint p(0.03, 0.04);
    double u = 0.0025;
    double I = std::pow(0.1, 0.5) * std::pow(u, 0.5) / 0.5;
    double want_scale = std::sqrt(I / (P.phi_norm() * u));
    TorusPoint img = K.phi(p);
    CHECK(img.x == doctest::Approx(0.03 * want_scale).epsilon(1e-12));
    CHECK(img.y == doctest::Approx(0.04 * want_scale).epsilon(1e-12));

    // radial: direction preserved, boundary fixed
    Vec2 c = centered_lift(img);
    CHECK(c.y / c.x == doctest::Approx(0.04 / 0.03).epsilon(1e-12));

    CounterRng rng(P.rng_seed(), 12);
    double worst = 0;
    for (int i = 0; i < 20000; ++i) {
        TorusPoint q = random_in_disk(rng, P.r0() * 1.3);
        worst = std::max(worst, torus_distance(K.phi_inv(K.phi(q)), q));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("normalizer from quadrature, cross-checked by Monte Carlo") {
    KatokParams P(0.5, 0.1);
    CHECK(P.kappa0() > 1.0);
    CounterRng rng(P.rng_seed(), 13);
    KatokMap K(P);
    const long N = 2000000;
    double acc = 0;
    for (long i = 0; i < N; ++i) {
        TorusPoint p(rng.next_double(), rng.next_double());
        acc += K.kappa(p);
    }
    double mc = acc / N;
    CHECK(std::fabs(mc - P.kappa0()) / P.kappa0() < 2e-3);

    // alpha -> 0 limit: kappa0 -> 1
    KatokParams P2(0.02, 0.1);
    CHECK(P2.kappa0() < 1.02);
    CHECK(P2.kappa0() > 1.0);
}

TEST_CASE("transport stage: exact density, inverse, fixed origin") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);

    TorusPoint z = K.area_fix(TorusPoint(0, 0));
    CHECK(std::fabs(centered(z.x)) < 1e-15);
    CHECK(std::fabs(centered(z.y)) < 1e-15);

    CounterRng rng(P.rng_seed(), 14);
    double worst = 0;
    for (int i = 0; i < 20000; ++i) {
        TorusPoint p = random_point(rng);
        worst = std::max(worst, torus_distance(K.area_fix_inv(K.area_fix(p)), p));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("composed change inverts") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);
    CounterRng rng(P.rng_seed(), 15);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        TorusPoint p = random_point(rng);
        worst = std::max(worst, torus_distance(K.change_inv(K.change(p)), p));
        worst = std::max(worst, torus_distance(K.change(K.change_inv(p)), p));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("Katok map: fixed point, conjugation identity, inverse") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);

    MapEvaluation at0 = K.apply_GT2(TorusPoint(0, 0));
    CHECK(torus_distance(at0.image, TorusPoint(0, 0)) < 1e-12);
    CHECK((at0.jacobian - Mat2::identity()).norm_inf() < 1e-9);
    CHECK(at0.jacobian.det() == doctest::Approx(1.0).epsilon(1e-9));

    CounterRng rng(P.rng_seed(), 16);
    double worst_conj = 0, worst_inv = 0;
    for (int i = 0; i < 2000; ++i) {
        TorusPoint p = random_point(rng);
        // conjugation identity: GT2 o change = change o G
        TorusPoint lhs = K.apply_GT2(K.change(p)).image;
        TorusPoint rhs = K.change(K.apply_G(p).image);
        worst_conj = std::max(worst_conj, torus_distance(lhs, rhs));

        MapEvaluation fwd = K.apply_GT2(p);
        worst_inv = std::max(worst_inv, torus_distance(K.apply_GT2_inv(fwd.image).image, p));
    }
    CHECK(worst_conj < 1e-9);
    CHECK(worst_inv < 1e-9);
}

TEST_CASE("Katok map preserves area: unit jacobian determinant") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);
    CounterRng rng(P.rng_seed(), 17);
    double worst = 0;
    int used = 0;
    for (int i = 0; i < 10000; ++i) {
        TorusPoint p = random_point(rng);
        if (disk_coordinate(p) < 1e-8) continue;
        ++used;
        double det = K.apply_GT2(p).jacobian.det();
        worst = std::max(worst, std::fabs(det - 1.0));
    }
    CHECK(used > 9900);
    CHECK(worst < 1e-7);
}

TEST_CASE("Katok map jacobian matches finite differences") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);
    CounterRng rng(P.rng_seed(), 18);
    const double R = std::sqrt(P.r0());
    int used = 0;
    double worst = 0;
    for (int i = 0; i < 300 && used < 120; ++i) {
        TorusPoint p = random_point(rng);
        Vec2 c = centered_lift(p);
        // keep away from the transport-stage seams where the map is only
        // Lipschitz: the disk circle and its two vertical tangents
        if (std::fabs(c.norm2() - P.r0()) < 5e-3) continue;
        if (std::fabs(std::fabs(c.x) - R) < 5e-3) continue;
        if (c.norm2() < 1e-4) continue;
        TorusPoint mid = K.change(p);
        Vec2 cm = centered_lift(mid);
        if (std::fabs(cm.norm2() - P.r0()) < 5e-3) continue;
        if (std::fabs(std::fabs(cm.x) - R) < 5e-3) continue;
        // the image side must stay clear of the seams too
        TorusPoint img = K.apply_GT2(p).image;
        Vec2 ci = centered_lift(img);
        if (std::fabs(ci.norm2() - P.r0()) < 5e-3) continue;
        if (std::fabs(std::fabs(ci.x) - R) < 5e-3) continue;
        ++used;

        Mat2 J = K.dGT2(p);
        double h = 1e-7;
        Vec2 eu = eigen_unstable(), es = eigen_stable();
        auto shift = [&](const Vec2& d) {
            return K.apply_GT2(TorusPoint(p.x + d.x, p.y + d.y)).image;
        };
        TorusPoint pu1 = shift(h * eu), pu0 = shift(-1.0 * h * eu);
        TorusPoint ps1 = shift(h * es), ps0 = shift(-1.0 * h * es);
        Vec2 du = torus_delta(pu0, pu1) / (2 * h);
        Vec2 ds = torus_delta(ps0, ps1) / (2 * h);
        // express in the eigen frame
        Mat2 FD(du.dot(eu), ds.dot(eu), du.dot(es), ds.dot(es));
        worst = std::max(worst, (J - FD).norm_inf() / std::max(1.0, J.norm_inf()));
    }
    CHECK(used >= 100);
    CHECK(worst < 2e-5);
}

TEST_CASE("invariant density residual of the slowed automorphism") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);

    // outside the disk with image outside: exact zero
    TorusPoint p(0.25, 0.25);
    CHECK(K.nu_invariance_residual(p) < 1e-12);

    CounterRng rng(P.rng_seed(), 19);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        TorusPoint q = random_in_disk(rng, P.r0() / 2);
        if (disk_coordinate(q) < 1e-8) continue;
        worst = std::max(worst, K.nu_invariance_residual(q));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("orbit iteration matches repeated application") {
    KatokParams P(0.5, 0.1);
    KatokMap K(P);
    TorusPoint p(0.3721, 0.1444);
    TorusPoint a = p;
    for (int i = 0; i < 7; ++i) a = K.apply_GT2(a).image;
    TorusPoint b = K.orbit_GT2(p, 7);
    CHECK(torus_distance(a, b) < 1e-9);
}
