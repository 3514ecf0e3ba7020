#include "katoklab/psi.hpp"
#include "katoklab/errors.hpp"

#include <cmath>
#include <limits>

namespace katoklab {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr int GL_N = 16;
constexpr double GL_X[GL_N] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
     0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
     0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double GL_W[GL_N] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

constexpr int CHEB_N = 48;

} // namespace

PsiProfile::PsiProfile(double alpha, double r0) : alpha_(alpha), r0_(r0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("alpha must be in (0,1)");
    if (!(r0 > 0.0 && r0 < 1.0)) throw InvalidParams("r0 must be in (0,1)");
    build_blend();
    verify_shape();
    build_integral_table();
}

void PsiProfile::build_blend() {
    // In tau-units the junction data are scale-free: p(0) = 2^-a and
    // p'(0) = A = a 2^-a (the power-law slope). The family
    // p'(tau) = A (1 - tau^k) is non-increasing for every k > 0, vanishes
    // at tau = 1, and its area A k/(k+1) must equal 1 - 2^-a, which fixes
    //   k = rho / (1 - rho),  rho = (2^a - 1)/a  in (ln 2, 1).
    const double a = alpha_;
    const double p0 = std::pow(2.0, -a);
    const double A = a * p0;
    const double rho = (std::pow(2.0, a) - 1.0) / a;
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidParams("blend exponent infeasible");
    const double k = rho / (1.0 - rho);
    blend_ = {p0, A, k};
}

double PsiProfile::blend_value(double tau) const {
    const double p0 = blend_[0], A = blend_[1], k = blend_[2];
    return p0 + A * (tau - std::pow(tau, k + 1.0) / (k + 1.0));
}

double PsiProfile::blend_derivative(double tau) const {
    const double A = blend_[1], k = blend_[2];
    return A * (1.0 - std::pow(tau, k));
}

double PsiProfile::psi(double u) const {
    if (u >= r0_) return 1.0;
    if (u <= 0.0) return 0.0;
    if (u <= 0.5 * r0_) return std::pow(u / r0_, alpha_);
    return blend_value((u - 0.5 * r0_) / (0.5 * r0_));
}

double PsiProfile::psi_prime(double u) const {
    if (u >= r0_ || u <= 0.0) return 0.0;
    if (u <= 0.5 * r0_) return (alpha_ / r0_) * std::pow(u / r0_, alpha_ - 1.0);
    return blend_derivative((u - 0.5 * r0_) / (0.5 * r0_)) / (0.5 * r0_);
}

void PsiProfile::verify_shape() const {
    // psi' > 0 and non-increasing on a dense grid of (0, r0); junction
    // continuity within 1e-12.
    const int n = 10000;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        double u = r0_ * double(i) / double(n + 1);
        double d = psi_prime(u);
        if (!(d > 0.0))
            throw InvalidParams("psi' not positive on (0, r0)");
        if (d > prev * (1.0 + 1e-9))
            throw InvalidParams("psi' not non-increasing on (0, r0)");
        prev = d;
    }
    double um = 0.5 * r0_;
    if (std::fabs(psi(um * (1 - 1e-14)) - psi(um)) > 1e-12 ||
        std::fabs(psi(r0_ * (1 - 1e-14)) - 1.0) > 1e-12)
        throw InvalidParams("psi junction mismatch");
}

void PsiProfile::build_integral_table() {
    // closed form below r0/2: int_0^u (v/r0)^-a dv = r0^a u^{1-a} / (1-a)
    const double a = alpha_;
    integral_at_half_ =
        std::pow(r0_, a) * std::pow(0.5 * r0_, 1.0 - a) / (1.0 - a);

    // Chebyshev interpolation of B(u) = int_{r0/2}^{u} dv/psi(v) on [r0/2, r0].
    // B at each Chebyshev node by composite Gauss-Legendre from r0/2.
    auto blend_inv_integral = [&](double from, double to) {
        double s = 0.0;
        const int pieces = 4;
        double w = (to - from) / pieces;
        for (int p = 0; p < pieces; ++p) {
            double lo = from + p * w;
            for (int i = 0; i < GL_N; ++i) {
                double u = lo + 0.5 * w * (GL_X[i] + 1.0);
                s += 0.5 * w * GL_W[i] / psi(u);
            }
        }
        return s;
    };

    std::vector<double> node_vals(CHEB_N);
    const double lo = 0.5 * r0_, hi = r0_;
    std::vector<double> nodes(CHEB_N);
    for (int k = 0; k < CHEB_N; ++k) {
        double x = std::cos(M_PI * (k + 0.5) / CHEB_N); // in (-1, 1)
        nodes[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
    }
    for (int k = 0; k < CHEB_N; ++k) node_vals[k] = blend_inv_integral(lo, nodes[k]);

    cheb_.assign(CHEB_N, 0.0);
    for (int j = 0; j < CHEB_N; ++j) {
        double s = 0.0;
        for (int k = 0; k < CHEB_N; ++k)
            s += node_vals[k] * std::cos(M_PI * j * (k + 0.5) / CHEB_N);
        cheb_[j] = 2.0 * s / CHEB_N;
    }
    integral_at_r0_ = integral_at_half_ + blend_inv_integral(lo, hi);
}

double PsiProfile::inv_psi_integral(double u) const {
    const double a = alpha_;
    if (u <= 0.0) return 0.0;
    if (u <= 0.5 * r0_)
        return std::pow(r0_, a) * std::pow(u, 1.0 - a) / (1.0 - a);
    if (u >= r0_) return integral_at_r0_ + (u - r0_);
    // Clenshaw evaluation of the tabulated blend integral
    double x = (2.0 * u - (0.5 * r0_ + r0_)) / (r0_ - 0.5 * r0_);
    double b1 = 0.0, b2 = 0.0;
    for (int j = CHEB_N - 1; j >= 1; --j) {
        double b0 = 2.0 * x * b1 - b2 + cheb_[j];
        b2 = b1; b1 = b0;
    }
    double val = x * b1 - b2 + 0.5 * cheb_[0];
    return integral_at_half_ + val;
}

double PsiProfile::inv_psi_integral_inverse(double value) const {
    const double a = alpha_;
    if (value <= 0.0) return 0.0;
    if (value >= integral_at_r0_) return r0_ + (value - integral_at_r0_);
    if (value <= integral_at_half_) {
        // invert r0^a u^{1-a}/(1-a) = value
        return std::pow(value * (1.0 - a) * std::pow(r0_, -a), 1.0 / (1.0 - a));
    }
    // bracketed Newton on the blend segment
    double lo = 0.5 * r0_, hi = r0_;
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        double f = inv_psi_integral(u) - value;
        if (f > 0) hi = u; else lo = u;
        double du = -f * psi(u); // f' = 1/psi
        double un = u + du;
        if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
        if (std::fabs(un - u) < 1e-16 * r0_) return un;
        u = un;
    }
    return u;
}

} // namespace katoklab
