#include "katoklab/flow.hpp"

#include <cmath>

#include "katoklab/errors.hpp"
#include "katoklab/ode.hpp"

namespace katoklab {

namespace {
constexpr double freeze_u = 1e-12;

struct StopIntegration {};
} // namespace

Vec2 SlowFlow::field(const Vec2& s) const {
    double u = s.norm2();
    double f = P_->psi().psi(u) * P_->log_lambda();
    return {s.x * f, -s.y * f};
}

Mat2 SlowFlow::variational_matrix(const Vec2& s) const {
    // Jacobian of the field. The (2,2) entry carries a minus sign: it is
    // the s2-derivative of -s2 psi(u) log(lambda). A finite-difference test
    // pins this sign in the suite.
    double u = s.norm2();
    double ps = P_->psi().psi(u);
    double dps = P_->psi().psi_prime(u);
    double L = P_->log_lambda();
    return Mat2(L * (ps + 2.0 * s.x * s.x * dps), L * (2.0 * s.x * s.y * dps),
                -L * (2.0 * s.x * s.y * dps), -L * (ps + 2.0 * s.y * s.y * dps));
}

Vec2 SlowFlow::flow(const Vec2& s0, double t, double cap2) const {
    if (s0.norm2() < freeze_u) return s0;
    if (s0.norm2() > cap2) throw ChartDomainError("flow start outside chart");
    Dopri5<2> ode(
        [this](const std::array<double, 2>& y, std::array<double, 2>& dy) {
            Vec2 f = field({y[0], y[1]});
            dy[0] = f.x;
            dy[1] = f.y;
        },
        P_->ode_tol());
    auto y = ode.integrate({s0.x, s0.y}, t, [cap2](double, const std::array<double, 2>& y) {
        if (y[0] * y[0] + y[1] * y[1] > cap2)
            throw ChartExitError("trajectory left the chart");
    });
    return {y[0], y[1]};
}

std::pair<Vec2, Mat2> SlowFlow::flow_with_jacobian(const Vec2& s0, double t,
                                                   double cap2) const {
    if (s0.norm2() < freeze_u) return {s0, Mat2::identity()};
    if (s0.norm2() > cap2) throw ChartDomainError("flow start outside chart");
    Dopri5<6> ode(
        [this](const std::array<double, 6>& y, std::array<double, 6>& dy) {
            Vec2 s{y[0], y[1]};
            Vec2 f = field(s);
            Mat2 D = variational_matrix(s);
            Mat2 J(y[2], y[3], y[4], y[5]);
            Mat2 dJ = D * J;
            dy[0] = f.x; dy[1] = f.y;
            dy[2] = dJ.a; dy[3] = dJ.b; dy[4] = dJ.c; dy[5] = dJ.d;
        },
        P_->ode_tol());
    auto y = ode.integrate({s0.x, s0.y, 1, 0, 0, 1}, t,
                           [cap2](double, const std::array<double, 6>& y) {
                               if (y[0] * y[0] + y[1] * y[1] > cap2)
                                   throw ChartExitError("trajectory left the chart");
                           });
    return {Vec2{y[0], y[1]}, Mat2(y[2], y[3], y[4], y[5])};
}

double SlowFlow::eta_flow(const Vec2& s0, double eta0, double t, double cap2) const {
    if (s0.norm2() < freeze_u) return eta0;
    const double L = P_->log_lambda();
    Dopri5<3> ode(
        [this, L](const std::array<double, 3>& y, std::array<double, 3>& dy) {
            Vec2 s{y[0], y[1]};
            double u = s.norm2();
            double ps = P_->psi().psi(u);
            double dps = P_->psi().psi_prime(u);
            double eta = y[2];
            Vec2 f = field(s);
            dy[0] = f.x; dy[1] = f.y;
            dy[2] = -2.0 * L * ((ps + u * dps) * eta + s.x * s.y * dps * (eta * eta + 1.0));
        },
        P_->ode_tol());
    auto y = ode.integrate({s0.x, s0.y, eta0}, t,
                           [cap2](double, const std::array<double, 3>& y) {
                               if (y[0] * y[0] + y[1] * y[1] > cap2)
                                   throw ChartExitError("trajectory left the chart");
                               if (std::fabs(y[2]) > 10.0)
                                   throw BlowupError("slope left the admissible range");
                           });
    return y[2];
}

std::pair<Vec2, Vec2> SlowFlow::flow_pair(
    const Vec2& a0, const Vec2& b0, double t, double cap2,
    const std::function<void(double, const Vec2&, const Vec2&)>& observe) const {
    Dopri5<4> ode(
        [this](const std::array<double, 4>& y, std::array<double, 4>& dy) {
            Vec2 fa = field({y[0], y[1]});
            Vec2 fb = field({y[2], y[3]});
            dy[0] = fa.x; dy[1] = fa.y; dy[2] = fb.x; dy[3] = fb.y;
        },
        P_->ode_tol());
    auto y = ode.integrate({a0.x, a0.y, b0.x, b0.y}, t,
                           [cap2, &observe](double tt, const std::array<double, 4>& y) {
                               if (y[0] * y[0] + y[1] * y[1] > cap2 ||
                                   y[2] * y[2] + y[3] * y[3] > cap2)
                                   throw ChartExitError("trajectory left the chart");
                               if (observe)
                                   observe(tt, Vec2{y[0], y[1]}, Vec2{y[2], y[3]});
                           });
    return {Vec2{y[0], y[1]}, Vec2{y[2], y[3]}};
}

SlowFlow::Crossing SlowFlow::first_crossing(
    const Vec2& s0, const std::function<double(const Vec2&)>& g, double t_max,
    int direction, double cap2) const {
    // march with the adaptive integrator, remembering the last accepted
    // state; refine the bracketing step by bisection re-integration
    struct Hit { double t_lo, t_hi; Vec2 s_lo; };
    Hit hit{};
    bool armed = false, found = false;
    double t_prev = 0.0;
    Vec2 s_prev = s0;
    double g_prev = g(s0);
    if ((direction > 0 && g_prev < 0) || (direction < 0 && g_prev > 0)) armed = true;

    Dopri5<2> ode(
        [this](const std::array<double, 2>& y, std::array<double, 2>& dy) {
            Vec2 f = field({y[0], y[1]});
            dy[0] = f.x; dy[1] = f.y;
        },
        P_->ode_tol());
    try {
        ode.integrate({s0.x, s0.y}, t_max, [&](double t, const std::array<double, 2>& y) {
            Vec2 s{y[0], y[1]};
            if (s.norm2() > cap2) throw ChartExitError("trajectory left the chart");
            double gv = g(s);
            if (!armed) {
                if ((direction > 0 && gv < 0) || (direction < 0 && gv > 0)) armed = true;
            } else if ((direction > 0 && g_prev <= 0 && gv > 0) ||
                       (direction < 0 && g_prev >= 0 && gv < 0)) {
                hit = {t_prev, t, s_prev};
                found = true;
                throw StopIntegration{};
            }
            t_prev = t; s_prev = s; g_prev = gv;
        });
    } catch (const StopIntegration&) {
    }
    if (!found) return {};

    // bisection on tau in [0, t_hi - t_lo] from the cached bracket state
    double lo = 0.0, hi = hit.t_hi - hit.t_lo;
    for (int it = 0; it < 64 && (hi - lo) > 1e-14 * (1.0 + hit.t_hi); ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(flow(hit.s_lo, mid, cap2));
        bool below = (direction > 0) ? (gm <= 0) : (gm >= 0);
        if (below) lo = mid; else hi = mid;
    }
    double tc = 0.5 * (lo + hi);
    return {true, hit.t_lo + tc, flow(hit.s_lo, tc, cap2)};
}

std::vector<Vec2> SlowFlow::states_at(const Vec2& s0, const std::vector<double>& times,
                                      double cap2) const {
    std::vector<Vec2> out;
    out.reserve(times.size());
    Vec2 s = s0;
    double t_cur = 0.0;
    for (double t : times) {
        s = flow(s, t - t_cur, cap2);
        t_cur = t;
        out.push_back(s);
    }
    return out;
}

} // namespace katoklab
