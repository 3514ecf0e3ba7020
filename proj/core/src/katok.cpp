#include "katoklab/katok.hpp"

#include <array>
#include <cmath>

#include "katoklab/errors.hpp"
#include "katoklab/ode.hpp"
#include "katoklab/rng.hpp"

namespace katoklab {

namespace {
// trajectories of time-+-1 maps from the disk stay well inside this plane cap
constexpr double plane_cap = 9.0;
constexpr double origin_u = 1e-30;
} // namespace

KatokMap::KatokMap(const KatokParams& params)
    : P_(params), flow_(P_) {
    Vec2 eu = eigen_unstable(), es = eigen_stable();
    R_ = Mat2(eu.x, es.x, eu.y, es.y);
    Rt_ = R_.transpose();
    rho_in_ = P_.phi_norm() / P_.kappa0();
    rho_out_ = 1.0 / P_.kappa0();
    dR_ = std::sqrt(P_.r0());

    // domain check for the time-+-1 maps: boundary trajectories must
    // integrate cleanly in the plane for one unit of time both ways
    for (int i = 0; i < 64; ++i) {
        double th = 2.0 * M_PI * (i + 0.25) / 64.0;
        Vec2 s{std::sqrt(P_.r0()) * std::cos(th), std::sqrt(P_.r0()) * std::sin(th)};
        flow_.flow(s, 1.0, plane_cap);
        flow_.flow(s, -1.0, plane_cap);
    }

    // The one-step influence zone of the slow-down disk must embed in the
    // torus: no point may have two lattice lifts whose unit-time orbits both
    // touch the disk. Sampled at construction; fails for r0 beyond ~0.1.
    CounterRng rng(0xC0FFEE, 99);
    for (int i = 0; i < 400; ++i) {
        TorusPoint p(rng.next_double(), rng.next_double());
        for (bool fwd : {true, false}) {
            int touches = 0;
            Vec2 c = centered_lift(p);
            for (int m = -1; m <= 1; ++m)
                for (int n = -1; n <= 1; ++n) {
                    Vec2 s = Rt_ * Vec2{c.x + m, c.y + n};
                    if (linear_min_u(s, fwd) > P_.r0() * (1.0 + 1e-9)) continue;
                    Vec2 out;
                    Mat2 J;
                    if (integrate_touching(s, fwd ? 1.0 : -1.0, &out, &J)) ++touches;
                }
            if (touches > 1)
                throw InvalidParams("slow-down influence zone wraps around the torus");
        }
    }
}

Mat2 KatokMap::to_eigen_frame(const Mat2& m) const { return Rt_ * m * R_; }
Mat2 KatokMap::to_torus_frame(const Mat2& m) const { return R_ * m * Rt_; }

// Smallest disk coordinate reached by the unit-time orbit of the comparison
// linear flow. The slowed orbit traverses a sub-arc of the same hyperbola,
// so this is a lower bound for the slowed orbit too: a value above r0
// certifies that the slow-down is never felt and the step is exactly linear.
double KatokMap::linear_min_u(const Vec2& s, bool forward) const {
    double a = s.x * s.x, b = s.y * s.y; // squared coords along e_u, e_s
    double grow = forward ? a : b;       // coordinate that expands
    double shrink = forward ? b : a;
    double u = a + b;
    if (grow >= shrink) return u;        // already past closest approach
    double L = P_.log_lambda();
    double tstar = std::log(shrink / grow) / (4.0 * L);
    if (tstar <= 1.0) return 2.0 * std::sqrt(a * b);
    double lam2 = P_.lambda() * P_.lambda();
    return grow * lam2 + shrink / lam2;  // endpoint of the unit arc
}

// Integrates the slowed flow for time +-1 from the given plane lift and
// decides whether the trajectory entered the slow-down disk. The disk
// coordinate along an orbit is unimodal with conserved product s1 s2, so
// touching is exact from the endpoints plus a vertex-crossing check; when
// the orbit never touches, the result equals the linear map exactly.
bool KatokMap::integrate_touching(const Vec2& lift_eigen, double t, Vec2* out,
                                  Mat2* jac) const {
    const double r0 = P_.r0();
    auto watch = [](double, const std::array<double, 6>& y) {
        if (y[0] * y[0] + y[1] * y[1] > plane_cap)
            throw ChartExitError("map trajectory left the plane window");
    };
    Dopri5<6> ode(
        [this](const std::array<double, 6>& y, std::array<double, 6>& dy) {
            Vec2 s{y[0], y[1]};
            Vec2 f = flow_.field(s);
            Mat2 D = flow_.variational_matrix(s);
            Mat2 J(y[2], y[3], y[4], y[5]);
            Mat2 dJ = D * J;
            dy[0] = f.x; dy[1] = f.y;
            dy[2] = dJ.a; dy[3] = dJ.b; dy[4] = dJ.c; dy[5] = dJ.d;
        },
        P_.ode_tol());
    auto y = ode.integrate({lift_eigen.x, lift_eigen.y, 1, 0, 0, 1}, t, watch);
    *out = {y[0], y[1]};
    *jac = Mat2(y[2], y[3], y[4], y[5]);

    double u0 = lift_eigen.norm2(), u1 = out->norm2();
    if (u0 <= r0 || u1 <= r0) return true;
    double mid2 = 2.0 * std::fabs(lift_eigen.x * lift_eigen.y);
    if (mid2 > r0) return false;
    bool fwd = t > 0;
    double g0 = fwd ? std::fabs(lift_eigen.x) : std::fabs(lift_eigen.y);
    double h0 = fwd ? std::fabs(lift_eigen.y) : std::fabs(lift_eigen.x);
    double g1 = fwd ? std::fabs(out->x) : std::fabs(out->y);
    double h1 = fwd ? std::fabs(out->y) : std::fabs(out->x);
    return g0 < h0 && g1 > h1; // crossed the closest-approach vertex
}

MapEvaluation KatokMap::map_step(const TorusPoint& p, bool forward) const {
    const double r0 = P_.r0();
    const double lam = P_.lambda();
    const double margin = 1.0 + 1e-9;
    // candidate plane lifts whose unit-time orbit could reach the disk:
    // the expanding coordinate is then below sqrt(r0), the contracting one
    // below lambda sqrt(r0)
    double bnd_grow2 = r0 * margin;
    double bnd_shrink2 = lam * lam * r0 * margin;
    Vec2 c = centered_lift(p);
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            Vec2 lift{c.x + m, c.y + n};
            Vec2 s = Rt_ * lift;
            double g2 = forward ? s.x * s.x : s.y * s.y;
            double h2 = forward ? s.y * s.y : s.x * s.x;
            if (g2 > bnd_grow2 || h2 > bnd_shrink2) continue;
            if (linear_min_u(s, forward) > r0 * margin) continue;
            Vec2 out;
            Mat2 J;
            bool touched = integrate_touching(s, forward ? 1.0 : -1.0, &out, &J);
            if (touched)
                return {torus_from_plane(R_ * out), J, Branch::slowdown};
        }
    }
    if (forward) {
        TorusPoint img(2.0 * p.x + p.y, p.x + p.y);
        return {img, Mat2::diag(lam, 1.0 / lam), Branch::linear};
    }
    TorusPoint img(p.x - p.y, -p.x + 2.0 * p.y);
    return {img, Mat2::diag(1.0 / lam, lam), Branch::linear};
}

MapEvaluation KatokMap::apply_G(const TorusPoint& p) const {
    return map_step(p, true);
}

MapEvaluation KatokMap::apply_G_inv(const TorusPoint& q) const {
    return map_step(q, false);
}

Vec2 KatokMap::phi_centered(const Vec2& c) const {
    double u = c.norm2();
    if (u >= P_.r0() || u <= origin_u) return c;
    double ut = P_.psi().inv_psi_integral(u) / P_.phi_norm();
    return c * std::sqrt(ut / u);
}

Vec2 KatokMap::phi_inv_centered(const Vec2& c) const {
    double ut = c.norm2();
    if (ut >= P_.r0() || ut <= origin_u) return c;
    double u = P_.psi().inv_psi_integral_inverse(P_.phi_norm() * ut);
    if (!(u >= 0.0 && u <= P_.r0() * (1.0 + 1e-12)))
        throw RootBracketError("radial inverse left the disk");
    return c * std::sqrt(u / ut);
}

TorusPoint KatokMap::phi(const TorusPoint& p) const {
    return torus_from_plane(phi_centered(centered_lift(p)));
}

TorusPoint KatokMap::phi_inv(const TorusPoint& p) const {
    return torus_from_plane(phi_inv_centered(centered_lift(p)));
}

Mat2 KatokMap::dphi_centered(const Vec2& c) const {
    double u = c.norm2();
    if (u >= P_.r0() || u <= origin_u) return Mat2::identity();
    double I = P_.psi().inv_psi_integral(u);
    double rho = std::sqrt(I / (P_.phi_norm() * u));
    // d/du of rho: rho' = (u/psi - I) / (2 rho phi_norm u^2)
    double dIdu = 1.0 / P_.psi().psi(u);
    double rho_p = (dIdu * u - I) / (2.0 * rho * P_.phi_norm() * u * u);
    return Mat2(rho + 2.0 * rho_p * c.x * c.x, 2.0 * rho_p * c.x * c.y,
                2.0 * rho_p * c.x * c.y, rho + 2.0 * rho_p * c.y * c.y);
}

namespace {
// cumulative chord area of the disk of radius R left of x
double disk_cum(double x, double R) {
    if (x <= -R) return 0.0;
    if (x >= R) return M_PI * R * R;
    double h = std::sqrt(std::max(0.0, R * R - x * x));
    return x * h + R * R * (std::asin(x / R) + 0.5 * M_PI);
}
} // namespace

Vec2 KatokMap::area_fix_centered(const Vec2& c) const {
    const double R = dR_, ro = rho_out_, dd = rho_in_ - rho_out_;
    double h = (std::fabs(c.x) < R) ? std::sqrt(R * R - c.x * c.x) : 0.0;
    double m1 = ro + 2.0 * dd * h;
    double X = ro * (c.x + 0.5) + dd * disk_cum(c.x, R) - 0.5;
    double clampy = std::max(-h, std::min(c.y, h));
    double Y = (ro * (c.y + 0.5) + dd * (clampy + h)) / m1 - 0.5;
    return {X, Y};
}

Vec2 KatokMap::area_fix_inv_centered(const Vec2& c) const {
    const double R = dR_, ro = rho_out_, dd = rho_in_ - rho_out_;
    // invert the x-CDF by bracketed Newton
    double X = c.x;
    double lo = -0.5, hi = 0.5, x = X;
    for (int it = 0; it < 200; ++it) {
        double f = ro * (x + 0.5) + dd * disk_cum(x, R) - 0.5 - X;
        if (f > 0) hi = x; else lo = x;
        double h = (std::fabs(x) < R) ? std::sqrt(R * R - x * x) : 0.0;
        double m1 = ro + 2.0 * dd * h;
        double xn = x - f / m1;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-17) { x = xn; break; }
        x = xn;
    }
    double h = (std::fabs(x) < R) ? std::sqrt(R * R - x * x) : 0.0;
    double m1 = ro + 2.0 * dd * h;
    // invert the piecewise-linear conditional CDF
    double Yp = (c.y + 0.5) * m1;
    double vlo = ro * (-h + 0.5);            // value just below the disk chord
    double vhi = ro * (h + 0.5) + 2.0 * dd * h;
    double y;
    if (h <= 0.0 || Yp <= vlo) y = Yp / ro - 0.5;
    else if (Yp >= vhi) y = (Yp - 2.0 * dd * h) / ro - 0.5;
    else y = (Yp - 0.5 * ro - dd * h) / (ro + dd);
    return {x, y};
}

Mat2 KatokMap::darea_fix_centered(const Vec2& c) const {
    const double R = dR_, ro = rho_out_, dd = rho_in_ - rho_out_;
    if (std::fabs(c.x) >= R) return Mat2(ro, 0.0, 0.0, 1.0);
    double h = std::sqrt(R * R - c.x * c.x);
    double m1 = ro + 2.0 * dd * h;
    double hp = (h > 1e-150) ? -c.x / h : 0.0;
    double m1p = 2.0 * dd * hp;
    double clampy = std::max(-h, std::min(c.y, h));
    double dclamp_dx = (c.y >= h) ? hp : ((c.y <= -h) ? -hp : 0.0);
    double num = ro * (c.y + 0.5) + dd * (clampy + h);
    double dnum_dx = dd * (dclamp_dx + hp);
    double d21 = (dnum_dx * m1 - num * m1p) / (m1 * m1);
    double rho = (c.norm2() < R * R) ? (ro + dd) : ro;
    return Mat2(m1, 0.0, d21, rho / m1);
}

TorusPoint KatokMap::area_fix(const TorusPoint& p) const {
    return torus_from_plane(area_fix_centered(centered_lift(p)));
}

TorusPoint KatokMap::area_fix_inv(const TorusPoint& p) const {
    return torus_from_plane(area_fix_inv_centered(centered_lift(p)));
}

TorusPoint KatokMap::change(const TorusPoint& p) const {
    return area_fix(phi(p));
}

TorusPoint KatokMap::change_inv(const TorusPoint& p) const {
    return phi_inv(area_fix_inv(p));
}

Mat2 KatokMap::dchange(const TorusPoint& p) const {
    Vec2 c = centered_lift(p);
    Vec2 mid = phi_centered(c);
    return darea_fix_centered(mid) * dphi_centered(c);
}

Mat2 KatokMap::dchange_at_inv(const TorusPoint& image, TorusPoint* preimage) const {
    TorusPoint pre = change_inv(image);
    if (preimage) *preimage = pre;
    return dchange(pre);
}

MapEvaluation KatokMap::apply_GT2(const TorusPoint& p) const {
    TorusPoint z;
    Mat2 Jpsi_z = dchange_at_inv(p, &z);
    MapEvaluation g = apply_G(z);
    Mat2 Jpsi_gz = dchange(g.image);
    Mat2 J_torus = Jpsi_gz * to_torus_frame(g.jacobian) * Jpsi_z.inverse();
    return {change(g.image), to_eigen_frame(J_torus), g.branch};
}

MapEvaluation KatokMap::apply_GT2_inv(const TorusPoint& q) const {
    TorusPoint z;
    Mat2 Jpsi_z = dchange_at_inv(q, &z);
    MapEvaluation g = apply_G_inv(z);
    Mat2 Jpsi_gz = dchange(g.image);
    Mat2 J_torus = Jpsi_gz * to_torus_frame(g.jacobian) * Jpsi_z.inverse();
    return {change(g.image), to_eigen_frame(J_torus), g.branch};
}

Mat2 KatokMap::dGT2(const TorusPoint& p) const { return apply_GT2(p).jacobian; }

TorusPoint KatokMap::orbit_GT2(const TorusPoint& p, long n) const {
    TorusPoint z = change_inv(p);
    if (n >= 0)
        for (long i = 0; i < n; ++i) z = apply_G(z).image;
    else
        for (long i = 0; i < -n; ++i) z = apply_G_inv(z).image;
    return change(z);
}

double KatokMap::kappa(const TorusPoint& p) const {
    double u = disk_coordinate(p);
    if (u > P_.r0()) return 1.0;
    return 1.0 / P_.psi().psi(u);
}

double KatokMap::nu_invariance_residual(const TorusPoint& p) const {
    MapEvaluation e = apply_G(p);
    return std::fabs(e.jacobian.det() * kappa(e.image) / kappa(p) - 1.0);
}

} // namespace katoklab
