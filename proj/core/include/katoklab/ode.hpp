#ifndef KATOKLAB_ODE_HPP
#define KATOKLAB_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "katoklab/errors.hpp"

namespace katoklab {

// Embedded Dormand-Prince 5(4) pair with PI step control. The systems here
// are autonomous and low-dimensional, so the integrator is a header template
// over the state size.
template <int N>
class Dopri5 {
public:
    using State = std::array<double, N>;
    using Field = std::function<void(const State&, State&)>;

    Dopri5(Field f, double rtol, double atol = 1e-16)
        : f_(std::move(f)), rtol_(rtol), atol_(atol) {}

    // Advance y from time 0 to time T (T may be negative). Calls observe
    // (if set) after every accepted step with (t, y). step_cb may veto a
    // state by throwing.
    State integrate(State y, double T,
                    const std::function<void(double, const State&)>& observe = nullptr) {
        if (T == 0.0) return y;
        double t = 0.0;
        double dir = (T > 0) ? 1.0 : -1.0;
        double h = dir * initial_step(y);
        State k1, k2, k3, k4, k5, k6, k7, ytmp, y5, y4;
        size_t rejects_in_a_row = 0;
        for (size_t step = 0; step < max_steps_; ++step) {
            bool last = false;
            if ((t + h - T) * dir >= 0.0) { h = T - t; last = true; }
            f_(y, k1);
            for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
            f_(ytmp, k2);
            for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f_(ytmp, k3);
            for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f_(ytmp, k4);
            for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f_(ytmp, k5);
            for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            f_(ytmp, k6);
            for (int i = 0; i < N; ++i) y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            f_(y5, k7);
            for (int i = 0; i < N; ++i) y4[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c5 * k5[i] + c6 * k6[i] + c7 * k7[i]);

            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                double sc = atol_ + rtol_ * std::max(std::fabs(y[i]), std::fabs(y5[i]));
                double e = (y5[i] - y4[i]) / sc;
                err += e * e;
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                t += h;
                y = y5;
                rejects_in_a_row = 0;
                if (observe) observe(t, y);
                if (last) return y;
                double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h *= std::min(5.0, std::max(0.2, fac));
            } else {
                if (++rejects_in_a_row > 60)
                    throw StepFailure("step size control failed to converge");
                double fac = 0.9 * std::pow(err, -0.2);
                h *= std::max(0.1, fac);
            }
            if (std::fabs(h) < 1e-15 * (std::fabs(t) + 1.0))
                throw StepFailure("step size underflow");
        }
        throw StepFailure("maximum step count exceeded");
    }

private:
    double initial_step(const State& y) {
        State dy;
        f_(y, dy);
        double ny = 0, nd = 0;
        for (int i = 0; i < N; ++i) {
            ny += y[i] * y[i];
            nd += dy[i] * dy[i];
        }
        double scale = std::sqrt(ny) + 1e-6;
        double speed = std::sqrt(nd) + 1e-12;
        return std::min(0.1, 0.01 * scale / speed + 1e-6);
    }

    Field f_;
    double rtol_, atol_;
    size_t max_steps_ = 2000000;

    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double c1 = 5179.0 / 57600, c3 = 7571.0 / 16695, c4 = 393.0 / 640,
                            c5 = -92097.0 / 339200, c6 = 187.0 / 2100, c7 = 1.0 / 40;
};

} // namespace katoklab

#endif
