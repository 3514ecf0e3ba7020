#include "katoklab/params.hpp"
#include "katoklab/errors.hpp"

#include <cmath>
#include <functional>

namespace katoklab {

double mod_unit(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r -= 1.0; // guard against floor rounding at negative epsilons
    return r;
}

double centered(double v) {
    double r = mod_unit(v + 0.5) - 0.5;
    return r;
}

TorusPoint::TorusPoint(double x_, double y_) : x(mod_unit(x_)), y(mod_unit(y_)) {}

Vec2 centered_lift(const TorusPoint& p) { return {centered(p.x), centered(p.y)}; }

TorusPoint torus_from_plane(const Vec2& v) { return TorusPoint(v.x, v.y); }

Vec2 torus_delta(const TorusPoint& p, const TorusPoint& q) {
    return {centered(q.x - p.x), centered(q.y - p.y)};
}

double torus_distance(const TorusPoint& p, const TorusPoint& q) {
    return torus_delta(p, q).norm();
}

Vec2 eigen_unstable() {
    // eigenvector of [[2,1],[1,1]] for lambda = (3+sqrt5)/2: (1, (sqrt5-1)/2)
    static const Vec2 e = Vec2(1.0, (std::sqrt(5.0) - 1.0) / 2.0).normalized();
    return e;
}

Vec2 eigen_stable() {
    static const Vec2 e = Vec2(1.0, -(std::sqrt(5.0) + 1.0) / 2.0).normalized();
    return e;
}

bool in_disk(const EigenPoint& s, double r) { return s.u() <= r; }

double disk_coordinate(const TorusPoint& p) { return centered_lift(p).norm2(); }

bool in_disk(const TorusPoint& p, double r) { return disk_coordinate(p) <= r; }

EigenPoint KatokParams::to_eigen(const TorusPoint& p) const {
    Vec2 c = centered_lift(p);
    return {c.dot(eigen_unstable()), c.dot(eigen_stable())};
}

TorusPoint KatokParams::from_eigen(const EigenPoint& s) const {
    Vec2 v = s.s1 * eigen_unstable() + s.s2 * eigen_stable();
    return torus_from_plane(v);
}

double compute_kappa0(const PsiProfile& psi) {
    // area element over the disk reduces to pi * du in the disk coordinate
    const double r0 = psi.r0();
    const double a = psi.alpha();
    // closed form over [0, r0/2] where psi = (u/r0)^a
    double inner = std::pow(r0, a) * std::pow(0.5 * r0, 1.0 - a) / (1.0 - a) - 0.5 * r0;

    // adaptive Simpson on the blend segment
    auto f = [&](double u) { return 1.0 / psi.psi(u) - 1.0; };
    struct Simpson {
        double operator()(const std::function<double(double)>& g, double lo,
                          double hi, double flo, double fmid, double fhi,
                          double tol, int depth) const {
            double mid = 0.5 * (lo + hi);
            double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            double flm = g(lm), frm = g(rm);
            double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            double err = left + right - whole;
            if (depth > 40) throw QuadratureError("kappa0 quadrature failed");
            if (std::fabs(err) < 15.0 * tol) return left + right + err / 15.0;
            return (*this)(g, lo, mid, flo, flm, fmid, 0.5 * tol, depth + 1) +
                   (*this)(g, mid, hi, fmid, frm, fhi, 0.5 * tol, depth + 1);
        }
    } simpson;
    double lo = 0.5 * r0, hi = r0;
    double blend = simpson(f, lo, hi, f(lo), f(0.5 * (lo + hi)), f(hi), 1e-13, 0);
    return 1.0 + M_PI * (inner + blend);
}

KatokParams::KatokParams(double alpha, double r0, double ode_tol, uint64_t rng_seed)
    : alpha_(alpha), r0_(r0), ode_tol_(ode_tol), rng_seed_(rng_seed),
      psi_(std::make_shared<PsiProfile>(alpha, r0)) {
    lambda_ = (3.0 + std::sqrt(5.0)) / 2.0;
    log_lambda_ = std::log(lambda_);
    r1_ = 2.0 * r0_ * log_lambda_;
    if (!(r1_ < chart_u_max))
        throw InvalidParams("r1 = 2 r0 log(lambda) must stay below the chart limit 0.2");
    C1_ = 2.0 * alpha_ * log_lambda_ / std::pow(r0_, alpha_);
    kappa0_ = compute_kappa0(*psi_);
    phi_norm_ = psi_->inv_psi_integral(r0_) / r0_;
    if (!(ode_tol_ > 0.0 && ode_tol_ < 1e-3))
        throw InvalidParams("ode_tol out of range");
}

double KatokParams::disk_inclusion_residual(int samples) const {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        double th = 2.0 * M_PI * double(i) / samples;
        double s1 = std::sqrt(r0_) * std::cos(th);
        double s2 = std::sqrt(r0_) * std::sin(th);
        double fwd = (s1 * s1) / (lambda_ * lambda_) + (s2 * s2) * lambda_ * lambda_;
        double bwd = (s1 * s1) * lambda_ * lambda_ + (s2 * s2) / (lambda_ * lambda_);
        worst = std::max(worst, std::max(fwd, bwd) / r1_);
    }
    return worst;
}

} // namespace katoklab
