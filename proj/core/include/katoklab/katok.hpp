#ifndef KATOKLAB_KATOK_HPP
#define KATOKLAB_KATOK_HPP

#include "katoklab/flow.hpp"
#include "katoklab/params.hpp"
#include "katoklab/vec2.hpp"

namespace katoklab {

enum class Branch { linear, slowdown };

struct MapEvaluation {
    TorusPoint image;
    Mat2 jacobian; // expressed in the eigen frame
    Branch branch = Branch::linear;
};

// The slowed automorphism G, the radial coordinate change phi, the
// area-restoring transport stage, and the composed map
//
//   GT2 = Psi o G o Psi^{-1},   Psi = area_fix o phi.
//
// phi is the radial change supported on the slow-down disk, normalized so
// the disk maps onto itself (normalizer phi_norm = I(r0)/r0 with
// I(u) = int_0^u dv/psi). That choice keeps phi bijective, but the pushed
// measure is then only piecewise proportional to area, so a second,
// globally supported triangular transport (area_fix) finishes the job. The
// composed jacobian satisfies det dGT2 = 1 identically away from the
// measure-zero seams of the two stages.
//
// All jacobians exposed here are written in the orthonormal eigen frame of
// the automorphism; cone and slope computations elsewhere rely on that.
class KatokMap {
public:
    explicit KatokMap(const KatokParams& params);

    const KatokParams& params() const { return P_; }
    const SlowFlow& flow() const { return flow_; }

    // slowed automorphism
    MapEvaluation apply_G(const TorusPoint& p) const;
    MapEvaluation apply_G_inv(const TorusPoint& q) const;

    // radial change (identity outside the slow-down disk)
    TorusPoint phi(const TorusPoint& p) const;
    TorusPoint phi_inv(const TorusPoint& p) const;

    // transport stage: pushes the remaining piecewise-constant density to
    // uniform; triangular (one CDF per coordinate), closed-form
    TorusPoint area_fix(const TorusPoint& p) const;
    TorusPoint area_fix_inv(const TorusPoint& p) const;

    // full change Psi and torus-frame jacobians
    TorusPoint change(const TorusPoint& p) const;
    TorusPoint change_inv(const TorusPoint& p) const;
    Mat2 dchange(const TorusPoint& p) const;
    Mat2 dchange_at_inv(const TorusPoint& image, TorusPoint* preimage = nullptr) const;

    // the Katok map
    MapEvaluation apply_GT2(const TorusPoint& p) const;
    MapEvaluation apply_GT2_inv(const TorusPoint& q) const;
    Mat2 dGT2(const TorusPoint& p) const;

    // n-fold iterate through the conjugation (single change of coordinates
    // at each end; equal to iterating apply_GT2)
    TorusPoint orbit_GT2(const TorusPoint& p, long n) const;

    // invariant density of G
    double kappa(const TorusPoint& p) const;
    double kappa0() const { return P_.kappa0(); }

    // |det dG(p) * kappa(G p)/kappa(p) - 1|
    double nu_invariance_residual(const TorusPoint& p) const;

    // eigen <-> torus frame conversion for jacobians
    Mat2 to_eigen_frame(const Mat2& torus_frame) const;
    Mat2 to_torus_frame(const Mat2& eigen_frame) const;

private:
    Mat2 dphi_centered(const Vec2& c) const;       // torus frame, at source point
    Mat2 darea_fix_centered(const Vec2& c) const;  // torus frame, at source point
    Vec2 phi_centered(const Vec2& c) const;
    Vec2 phi_inv_centered(const Vec2& c) const;
    Vec2 area_fix_centered(const Vec2& c) const;
    Vec2 area_fix_inv_centered(const Vec2& c) const;

    double linear_min_u(const Vec2& s, bool forward) const;
    bool integrate_touching(const Vec2& lift_eigen, double t, Vec2* out, Mat2* jac) const;
    MapEvaluation map_step(const TorusPoint& p, bool forward) const;

    KatokParams P_;
    SlowFlow flow_;
    Mat2 R_;     // columns: unstable, stable eigenvectors
    Mat2 Rt_;
    double rho_in_, rho_out_, dR_; // transport-stage densities and disk radius
};

} // namespace katoklab

#endif
