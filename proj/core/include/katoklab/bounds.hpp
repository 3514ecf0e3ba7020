#ifndef KATOKLAB_BOUNDS_HPP
#define KATOKLAB_BOUNDS_HPP

#include <cstdint>
#include <vector>

#include "katoklab/katok.hpp"

namespace katoklab {

// Verification harness for the quantitative flow estimates: passage-time
// bounds through the core disk, contraction of stable pairs, annulus
// sojourn times, the Hessian envelope, angle-contraction products, and the
// summability quantities used by the distortion analysis.
//
// All checks run on the continuous flow with event-located passages.
// Samples violating a lemma's hypotheses are skipped and counted, never
// treated as failures.
class BoundsHarness {
public:
    explicit BoundsHarness(const KatokMap& K) : K_(&K) {}

    // --- Hessian envelope -------------------------------------------------
    // Second partials of (s1,s2) -> s2 psi(s1^2+s2^2) by central
    // differences against the envelope (6a/r0^a) u^{a-1/2}. Returns the
    // worst |d_ij| / envelope ratio over samples in the inner half-disk.
    double check_hessian_bound(int samples, uint64_t stream = 31) const;

    // --- passages through the half disk ------------------------------------
    struct Passage {
        Vec2 entry;
        double T = 0.0;   // exit time
        double T1 = 0.0;  // diagonal crossing time
        std::vector<double> times;
        std::vector<Vec2> states;
        bool valid = false;
    };
    Passage make_passage(double angle, int n_samples = 12) const;
    std::vector<Passage> sample_passages(int count, uint64_t stream = 32) const;

    struct PassageReport {
        int checked = 0;
        int skipped = 0;
        double worst_margin = 1e300;     // min relative margin over displays
        double t_estimate_margin = 1e300;
        double t1_symmetry = 0.0;        // max |T1/T - 1/2|
        double slope = 0.0;              // log T vs log s1(T1)
        double slope_r2 = 0.0;
    };
    PassageReport check_passage_bounds(const std::vector<Passage>& ps) const;

    // --- stable-pair contraction -------------------------------------------
    struct PairReport {
        int checked = 0;
        int skipped = 0;
        double worst_decay_margin = 1e300;   // the two displayed decays
        double worst_final_margin = 1e300;   // final norm bound
        double worst_ratio_margin = 1e300;   // Delta s2/s2 at T1 vs at 0
    };
    PairReport check_pair_contraction(int count, double mu, uint64_t stream = 33) const;

    // --- annulus sojourn -----------------------------------------------------
    struct TransitReport {
        double bound = 0.0;       // 16 * 2^alpha / log lambda
        double observed_max = 0.0;
        int samples = 0;
    };
    TransitReport check_transit_bound(int count, uint64_t stream = 34) const;
    // sojourn of one trajectory entering the annulus at the given state
    double annulus_sojourn(const Vec2& entry) const;

    // --- angle contraction products -----------------------------------------
    struct GammaProductReport {
        int checked = 0;
        int skipped = 0;
        int violations = 0;
        double worst_ratio = 0.0; // product / bound, without the slack
    };
    GammaProductReport check_gamma_products(int count, double mu, double slack,
                                            uint64_t stream = 35) const;

    // --- summability along a return orbit ------------------------------------
    struct SummabilityReport {
        double sum_delta = 0.0;
        double sum_gamma_products = 0.0;
        double gamma_product = 1.0;
        int tau = 0;
        bool hypotheses_met = false;
    };
    // x: a point whose orbit returns after tau steps; the stable partner is
    // grown at distance eps along the numerically computed stable direction
    SummabilityReport check_summability(const TorusPoint& x, int tau, double mu,
                                        double eps = 1e-7) const;

    // numerically converged stable direction at x (backward transport of a
    // stable-cone vector along n forward steps)
    Vec2 stable_direction(const TorusPoint& x, int n = 30) const;

private:
    const KatokMap* K_;
};

} // namespace katoklab

#endif
