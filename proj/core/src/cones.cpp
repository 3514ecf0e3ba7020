#include "katoklab/cones.hpp"

#include <cmath>

namespace katoklab {

bool in_cone(const Vec2& v, double mu, ConeSide side, double slack) {
    if (side == ConeSide::unstable)
        return std::fabs(v.y) <= mu * std::fabs(v.x) * (1.0 + slack);
    return std::fabs(v.x) <= mu * std::fabs(v.y) * (1.0 + slack);
}

double mu0_analytic(double alpha) {
    double b = 1.0 + 1.0 / (2.0 * alpha);
    return b - std::sqrt(b * b - 1.0);
}

double cone_criterion(double eta, double alpha) {
    return eta / (2.0 * alpha) - 0.5 * (eta - 1.0) * (eta - 1.0);
}

ConeCheck check_cone_invariance(const KatokMap& K, const TorusPoint& p, double mu,
                                int directions) {
    ConeCheck out;
    MapEvaluation e = K.apply_G(p);
    Mat2 J = e.jacobian;
    Mat2 Jinv = J.inverse();
    const double tol = 1e-12;
    for (int i = 0; i <= directions; ++i) {
        double f = -1.0 + 2.0 * double(i) / directions; // slope fraction in [-1,1]
        // unstable cone: v = (1, f mu)
        Vec2 w = J * Vec2{1.0, f * mu};
        double margin = mu * std::fabs(w.x) - std::fabs(w.y);
        out.worst_margin = std::min(out.worst_margin, margin / (mu * std::fabs(w.x) + 1e-300));
        if (!(margin >= -tol * std::fabs(w.x))) out.forward_ok = false;
        // stable cone pulled back: v = (f mu, 1)
        Vec2 b = Jinv * Vec2{f * mu, 1.0};
        double bmargin = mu * std::fabs(b.y) - std::fabs(b.x);
        out.worst_margin = std::min(out.worst_margin, bmargin / (mu * std::fabs(b.y) + 1e-300));
        if (!(bmargin >= -tol * std::fabs(b.y))) out.backward_ok = false;
    }
    return out;
}

namespace {
double angle_rate(const Mat2& J, double det, double theta) {
    Vec2 v{std::cos(theta), std::sin(theta)};
    Vec2 w = J * v;
    return det / w.norm2();
}
} // namespace

double gamma_factor_of(const Mat2& J, double mu, int directions) {
    double det = J.det();
    double a = std::atan(mu);
    double best = 0.0, best_th = -a;
    for (int i = 0; i <= directions; ++i) {
        double th = -a + 2.0 * a * double(i) / directions;
        double q = angle_rate(J, det, th);
        if (q > best) { best = q; best_th = th; }
    }
    // golden-section refinement around the grid maximum
    double lo = std::max(-a, best_th - 2.0 * a / directions);
    double hi = std::min(a, best_th + 2.0 * a / directions);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = angle_rate(J, det, c), fd = angle_rate(J, det, d);
    for (int it = 0; it < 60 && (hi - lo) > 1e-12; ++it) {
        if (fc < fd) {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo); fd = angle_rate(J, det, d);
        } else {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo); fc = angle_rate(J, det, c);
        }
    }
    return std::max(best, std::max(fc, fd));
}

double gamma_factor(const KatokMap& K, const TorusPoint& p, double mu,
                    int directions) {
    return gamma_factor_of(K.apply_G(p).jacobian, mu, directions);
}

double gamma_linear(double lambda, double mu) {
    // det = 1; |J v|^2 minimized on the cone edge v = (1, mu)/sqrt(1+mu^2)
    return (1.0 + mu * mu) / (lambda * lambda + mu * mu / (lambda * lambda));
}

} // namespace katoklab
