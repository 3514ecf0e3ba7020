#ifndef KATOKLAB_CONES_HPP
#define KATOKLAB_CONES_HPP

#include "katoklab/katok.hpp"
#include "katoklab/vec2.hpp"

namespace katoklab {

// Cone fields around the eigendirections, their invariance under the
// differential of the slowed automorphism, and the per-step angle
// contraction factor. Angles are measured in the eigen-chart Euclidean
// structure throughout.

// v in K+ iff |v2| < mu |v1|; v in K- iff |v1| < mu |v2|
enum class ConeSide { unstable, stable };

bool in_cone(const Vec2& v, double mu, ConeSide side, double slack = 0.0);

// Positive root below 1 of eta/(2 alpha) - (eta - 1)^2 / 2 = 0. Cones with
// mu above this threshold are invariant.
double mu0_analytic(double alpha);

// The quadratic criterion whose positivity on [mu0, 1] drives invariance.
double cone_criterion(double eta, double alpha);

struct ConeCheck {
    bool forward_ok = true;   // dG K+ inside K+
    bool backward_ok = true;  // dG^{-1} K- inside K-
    double worst_margin = 1.0; // min over directions of mu|w1| - |w2| scaled
};

// Grid check of cone invariance at a point (32 directions across the cone
// plus its boundary).
ConeCheck check_cone_invariance(const KatokMap& K, const TorusPoint& p, double mu,
                                int directions = 32);

// Angle contraction factor of a positively oriented linear map on the cone:
// the maximal derivative of the mapped direction angle, det(J)/|J v|^2,
// maximized over the cone by a direction grid plus golden-section
// refinement.
double gamma_factor_of(const Mat2& J, double mu, int directions = 64);

// gamma at a point of the slowed automorphism
double gamma_factor(const KatokMap& K, const TorusPoint& p, double mu,
                    int directions = 64);

// exact value for the linear branch (extremal direction is the cone edge)
double gamma_linear(double lambda, double mu);

} // namespace katoklab

#endif
