#ifndef KATOKLAB_FLOW_HPP
#define KATOKLAB_FLOW_HPP

#include <functional>
#include <utility>
#include <vector>

#include "katoklab/params.hpp"
#include "katoklab/vec2.hpp"

namespace katoklab {

// The slow-down flow in the eigen-chart:
//   ds1/dt =  s1 psi(s1^2+s2^2) log(lambda)
//   ds2/dt = -s2 psi(s1^2+s2^2) log(lambda)
// together with its variational and tangent-slope dynamics. All functions
// are pure; instances are cheap to copy and safe to share.
class SlowFlow {
public:
    explicit SlowFlow(const KatokParams& params) : P_(&params) {}

    Vec2 field(const Vec2& s) const;

    // coefficient matrix of the variational equation at s
    Mat2 variational_matrix(const Vec2& s) const;

    // time-t map. Throws ChartExitError if the trajectory leaves u <= cap2
    // and StepFailure if the integrator cannot meet the tolerance. States
    // with u < 1e-12 are frozen (the field there is below noise).
    Vec2 flow(const Vec2& s0, double t,
              double cap2 = KatokParams::chart_u_max) const;

    std::pair<Vec2, Mat2> flow_with_jacobian(
        const Vec2& s0, double t,
        double cap2 = KatokParams::chart_u_max) const;

    // slope eta = zeta2/zeta1 advected along the orbit of s0; throws
    // BlowupError when |eta| exceeds 10
    double eta_flow(const Vec2& s0, double eta0, double t,
                    double cap2 = KatokParams::chart_u_max) const;

    // two orbits integrated jointly (shared adaptive steps)
    std::pair<Vec2, Vec2> flow_pair(const Vec2& a0, const Vec2& b0, double t,
                                    double cap2 = KatokParams::chart_u_max,
                                    const std::function<void(double, const Vec2&, const Vec2&)>& observe = nullptr) const;

    // First time in (0, t_max] at which g changes sign from negative to
    // positive (direction +1) or positive to negative (-1), refined by
    // bisection to ~1e-13. found = false if no crossing before t_max.
    struct Crossing {
        bool found = false;
        double t = 0.0;
        Vec2 s;
    };
    Crossing first_crossing(const Vec2& s0,
                            const std::function<double(const Vec2&)>& g,
                            double t_max, int direction,
                            double cap2 = KatokParams::chart_u_max) const;

    // states at the given increasing times (single continued integration)
    std::vector<Vec2> states_at(const Vec2& s0, const std::vector<double>& times,
                                double cap2 = KatokParams::chart_u_max) const;

    const KatokParams& params() const { return *P_; }

private:
    const KatokParams* P_;
};

} // namespace katoklab

#endif
