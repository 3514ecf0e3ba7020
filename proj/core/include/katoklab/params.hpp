#ifndef KATOKLAB_PARAMS_HPP
#define KATOKLAB_PARAMS_HPP

#include <cstdint>
#include <memory>

#include "katoklab/psi.hpp"
#include "katoklab/vec2.hpp"

namespace katoklab {

// Point on the torus, coordinates reduced to [0, 1).
struct TorusPoint {
    double x = 0.0, y = 0.0;
    TorusPoint() = default;
    TorusPoint(double x_, double y_);
};

// Point in the orthonormal chart spanned by the unstable/stable
// eigendirections of the automorphism.
struct EigenPoint {
    double s1 = 0.0, s2 = 0.0;
    EigenPoint() = default;
    EigenPoint(double a, double b) : s1(a), s2(b) {}
    double u() const { return s1 * s1 + s2 * s2; } // disk coordinate
    Vec2 vec() const { return {s1, s2}; }
};

double mod_unit(double v);             // reduce to [0, 1)
double centered(double v);             // reduce to [-1/2, 1/2)
Vec2 centered_lift(const TorusPoint& p);
TorusPoint torus_from_plane(const Vec2& v);

// Shortest displacement q - p on the torus and induced distance.
Vec2 torus_delta(const TorusPoint& p, const TorusPoint& q);
double torus_distance(const TorusPoint& p, const TorusPoint& q);

// Unit eigenvectors of A = [[2,1],[1,1]], positive first component.
// Orthogonal since A is symmetric.
Vec2 eigen_unstable();
Vec2 eigen_stable();

// Disk membership in the chart convention: p in D_r iff s1^2 + s2^2 <= r.
// The threshold is the squared Euclidean radius; a single predicate is
// exported so no caller can mix up the convention.
bool in_disk(const EigenPoint& s, double r);
bool in_disk(const TorusPoint& p, double r);
double disk_coordinate(const TorusPoint& p); // s1^2 + s2^2 of the centered lift

// All construction parameters plus derived constants. Immutable after
// construction; safe to share across threads.
class KatokParams {
public:
    KatokParams(double alpha, double r0, double ode_tol = 1e-12,
                uint64_t rng_seed = 0x9E3779B97F4A7C15ULL);

    static KatokParams defaults() { return KatokParams(0.5, 0.1); }

    double alpha() const { return alpha_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }
    double lambda() const { return lambda_; }
    double log_lambda() const { return log_lambda_; }
    double C1() const { return C1_; }
    double ode_tol() const { return ode_tol_; }
    uint64_t rng_seed() const { return rng_seed_; }

    // normalizer kappa0 = integral of kappa over the torus
    double kappa0() const { return kappa0_; }
    // radial-change normalizer: (1/r0) * int_0^{r0} dv/psi(v). This is the
    // value that maps the slow-down disk onto itself; see katok.hpp.
    double phi_norm() const { return phi_norm_; }

    const PsiProfile& psi() const { return *psi_; }

    // Largest disk coordinate for which the chart lift is unambiguous;
    // construction enforces r1 < chart limit.
    static constexpr double chart_u_max = 0.2;

    // Sampled check of the inclusion of the slow-down disk boundary in the
    // images of the chart disk under A and A^{-1}; returns the worst ratio
    // (values <= 1 would mean the inclusion holds). Reported as a
    // diagnostic, not enforced: with r1 = 2 r0 log(lambda) the ratio is
    // lambda^2/(2 log lambda) for every r0.
    double disk_inclusion_residual(int samples = 256) const;

    EigenPoint to_eigen(const TorusPoint& p) const;
    TorusPoint from_eigen(const EigenPoint& s) const;

private:
    double alpha_, r0_, r1_, lambda_, log_lambda_, C1_, ode_tol_;
    double kappa0_, phi_norm_;
    uint64_t rng_seed_;
    std::shared_ptr<const PsiProfile> psi_;
};

// kappa0 by adaptive quadrature of (1/psi - 1) over the slow-down disk in
// polar coordinates (the angular integral is trivial; areas are linear in
// the disk coordinate). Deterministic to ~1e-12.
double compute_kappa0(const PsiProfile& psi);

} // namespace katoklab

#endif
