#include <doctest.h>

#include <cmath>

#include "katoklab/errors.hpp"
#include "katoklab/params.hpp"
#include "katoklab/rng.hpp"

using namespace katoklab;

TEST_CASE("eigen basis of the automorphism") {
    Vec2 eu = eigen_unstable(), es = eigen_stable();
    // hand-solved eigenvectors of [[2,1],[1,1]]
    double gu = (std::sqrt(5.0) - 1.0) / 2.0;
    double gs = -(std::sqrt(5.0) + 1.0) / 2.0;
    CHECK(eu.y / eu.x == doctest::Approx(gu).epsilon(1e-14));
    CHECK(es.y / es.x == doctest::Approx(gs).epsilon(1e-14));
    CHECK(eu.x > 0);
    CHECK(es.x > 0);
    CHECK(std::fabs(eu.dot(es)) < 1e-15);

    double lam = (3.0 + std::sqrt(5.0)) / 2.0;
    Vec2 Aeu{2 * eu.x + eu.y, eu.x + eu.y};
    Vec2 Aes{2 * es.x + es.y, es.x + es.y};
    CHECK((Aeu - lam * eu).norm() < 1e-14);
    CHECK((Aes - (1.0 / lam) * es).norm() < 1e-14);
}

TEST_CASE("derived constants recomputed from (alpha, r0)") {
    KatokParams P(0.5, 0.1);
    double lam = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::fabs(P.lambda() - lam) < 1e-15);
    CHECK(std::fabs(P.r1() - 2.0 * 0.1 * std::log(lam)) < 1e-14);
    CHECK(std::fabs(P.C1() - 2.0 * 0.5 * std::log(lam) / std::pow(0.1, 0.5)) < 1e-14);
    CHECK(P.kappa0() > 1.0);
    CHECK(P.phi_norm() > 1.0);

    // chart constraint: r1 must stay below the injectivity bound
    CHECK_THROWS_AS(KatokParams(0.5, 0.11), InvalidParams);
    CHECK_THROWS_AS(KatokParams(1.5, 0.1), InvalidParams);
    CHECK_THROWS_AS(KatokParams(0.5, 1.1), InvalidParams);
}

TEST_CASE("chart conversions") {
    KatokParams P(0.5, 0.1);
    CHECK(P.to_eigen(TorusPoint(0, 0)).s1 == 0.0);
    CHECK(P.to_eigen(TorusPoint(0, 0)).s2 == 0.0);

    TorusPoint back = P.from_eigen(EigenPoint(0, 0));
    CHECK(back.x == 0.0);
    CHECK(back.y == 0.0);

    CounterRng rng(7, 1);
    for (int i = 0; i < 10000; ++i) {
        // random point in the chart disk
        double r = std::sqrt(P.r1() * rng.next_double());
        double th = 2 * M_PI * rng.next_double();
        EigenPoint s(r * std::cos(th), r * std::sin(th));
        EigenPoint s2 = P.to_eigen(P.from_eigen(s));
        CHECK(std::fabs(s.s1 - s2.s1) < 1e-12);
        CHECK(std::fabs(s.s2 - s2.s2) < 1e-12);
    }

    // the chart is an isometry: disk coordinate equals squared distance
    TorusPoint p(0.01, 0.02);
    EigenPoint s = P.to_eigen(p);
    CHECK(s.u() == doctest::Approx(0.01 * 0.01 + 0.02 * 0.02).epsilon(1e-13));
}

TEST_CASE("slow-down profile values") {
    KatokParams P(0.5, 0.1);
    const PsiProfile& psi = P.psi();
    CHECK(psi.psi(0.0) == 0.0);
    CHECK(psi.psi(0.05) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));
    CHECK(psi.psi(0.2) == 1.0);
    CHECK(psi.psi(0.1) == doctest::Approx(1.0).epsilon(1e-12));

    // junction continuity of psi and psi'
    for (double u : {0.05, 0.1}) {
        double below = psi.psi(u * (1 - 1e-13));
        double above = psi.psi(u * (1 + 1e-13));
        CHECK(std::fabs(below - above) < 1e-12);
        double dbelow = psi.psi_prime(u * (1 - 1e-13));
        double dabove = psi.psi_prime(u * (1 + 1e-13));
        CHECK(std::fabs(dbelow - dabove) < 1e-6); // psi'' bounded, kink-free
    }
}

TEST_CASE("cumulative 1/psi integral and its inverse") {
    KatokParams P(0.5, 0.1);
    const PsiProfile& psi = P.psi();
    // closed form below r0/2
    double u = 0.03;
    double want = std::pow(0.1, 0.5) * std::pow(u, 0.5) / 0.5;
    CHECK(psi.inv_psi_integral(u) == doctest::Approx(want).epsilon(1e-13));

    // numeric cross-check on the blend segment by midpoint Riemann sums
    double lo = 0.05, hi = 0.082;
    int n = 200000;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        double v = lo + (hi - lo) * (i + 0.5) / n;
        acc += (hi - lo) / n / psi.psi(v);
    }
    CHECK(psi.inv_psi_integral(hi) - psi.inv_psi_integral(lo) ==
          doctest::Approx(acc).epsilon(1e-9));

    // inverse round trip across all segments
    for (double uu : {0.001, 0.02, 0.05, 0.06, 0.08, 0.0999, 0.15}) {
        double I = psi.inv_psi_integral(uu);
        CHECK(psi.inv_psi_integral_inverse(I) == doctest::Approx(uu).epsilon(1e-11));
    }
}

TEST_CASE("disk membership convention") {
    KatokParams P(0.5, 0.1);
    // radius-squared convention: (0.3, 0) has disk coordinate 0.09 <= 0.1
    CHECK(in_disk(TorusPoint(0.3, 0.0), 0.1));
    CHECK_FALSE(in_disk(TorusPoint(0.33, 0.0), 0.1));
    CHECK(in_disk(EigenPoint(0.32, 0.0), 0.1) == false);
    CHECK(in_disk(EigenPoint(0.31, 0.0), 0.0961));

    // membership is computed on the centered lift
    CHECK(in_disk(TorusPoint(0.99, 0.99), 0.001));
}

TEST_CASE("disk inclusion residual is reported, not asserted") {
    KatokParams P(0.5, 0.1);
    double lam = P.lambda();
    // the ratio is lambda^2 / (2 log lambda) for every r0
    CHECK(P.disk_inclusion_residual() ==
          doctest::Approx(lam * lam / (2.0 * std::log(lam))).epsilon(1e-9));
}
