#ifndef KATOKLAB_PSI_HPP
#define KATOKLAB_PSI_HPP

#include <array>
#include <vector>

namespace katoklab {

// Slow-down profile: psi(u) = (u/r0)^alpha for u <= r0/2, 1 for u >= r0,
// and a quintic Hermite blend in between matching value and first two
// derivatives at both junctions. The blend has no closed-form integral, so
// the cumulative integral of 1/psi is tabulated on a Chebyshev grid at
// construction.
//
// Construction verifies on a dense grid that psi' > 0 and is non-increasing
// on (0, r0); parameter sets violating this are rejected.
class PsiProfile {
public:
    PsiProfile(double alpha, double r0);

    double alpha() const { return alpha_; }
    double r0() const { return r0_; }

    double psi(double u) const;
    double psi_prime(double u) const;

    // integral of 1/psi over [0, u]; finite for all u since alpha < 1
    double inv_psi_integral(double u) const;

    // inverse of u -> inv_psi_integral(u) on [0, umax]; used by the radial
    // coordinate change
    double inv_psi_integral_inverse(double value) const;

    // blend coefficients {value at r0/2, slope scale A, exponent k} in the
    // normalized variable tau = (u - r0/2)/(r0/2):
    //   psi = p0 + A (tau - tau^{k+1}/(k+1)),  d psi/d tau = A (1 - tau^k).
    // A matches the power-law slope at r0/2 and k is solved from
    // psi(r0) = 1, so the derivative is non-increasing by construction.
    const std::array<double, 3>& blend_coefficients() const { return blend_; }

private:
    double blend_value(double tau) const;
    double blend_derivative(double tau) const;
    void build_blend();
    void build_integral_table();
    void verify_shape() const;

    double alpha_;
    double r0_;
    std::array<double, 3> blend_{}; // {p0, A, k}
    // Chebyshev interpolant of the blend part of the cumulative integral
    std::vector<double> cheb_;      // Chebyshev coefficients
    double integral_at_half_;       // integral of 1/psi over [0, r0/2]
    double integral_at_r0_;         // integral of 1/psi over [0, r0]
};

} // namespace katoklab

#endif
