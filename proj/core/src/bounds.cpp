#include "katoklab/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "katoklab/cones.hpp"
#include "katoklab/errors.hpp"
#include "katoklab/rng.hpp"
#include "katoklab/stats.hpp"

namespace katoklab {

namespace {
constexpr double rel_slack = 1e-6;
}

double BoundsHarness::check_hessian_bound(int samples, uint64_t stream) const {
    const KatokParams& P = K_->params();
    const double a = P.alpha(), r0 = P.r0();
    const double env_c = 6.0 * a / std::pow(r0, a);
    auto f = [&](double s1, double s2) {
        return s2 * P.psi().psi(s1 * s1 + s2 * s2);
    };
    double worst = 0.0;
    CounterRng rng(P.rng_seed(), stream);
    for (int i = 0; i < samples; ++i) {
        // interior of the half disk, stencil kept inside the power region
        double rr = std::sqrt(0.46 * r0 * rng.next_double());
        double th = 2.0 * M_PI * rng.next_double();
        double s1 = rr * std::cos(th), s2 = rr * std::sin(th);
        double u = s1 * s1 + s2 * s2;
        if (u < 1e-10) continue;
        double h = 1e-5 * std::max(std::sqrt(u), 1e-3);
        double d11 = (f(s1 + h, s2) - 2.0 * f(s1, s2) + f(s1 - h, s2)) / (h * h);
        double d22 = (f(s1, s2 + h) - 2.0 * f(s1, s2) + f(s1, s2 - h)) / (h * h);
        double d12 = (f(s1 + h, s2 + h) - f(s1 + h, s2 - h) - f(s1 - h, s2 + h) +
                      f(s1 - h, s2 - h)) /
                     (4.0 * h * h);
        double env = env_c * std::pow(u, a - 0.5);
        double m = std::max({std::fabs(d11), std::fabs(d12), std::fabs(d22)});
        worst = std::max(worst, m / env);
    }
    return worst;
}

BoundsHarness::Passage BoundsHarness::make_passage(double angle, int n_samples) const {
    const KatokParams& P = K_->params();
    const SlowFlow& fl = K_->flow();
    const double half = 0.5 * P.r0();
    Passage out;
    double R = std::sqrt(half);
    out.entry = {R * std::cos(angle), R * std::sin(angle)};
    if (std::fabs(out.entry.y) <= std::fabs(out.entry.x)) return out; // not inward

    auto exit_fn = [half](const Vec2& s) { return s.norm2() - half; };
    SlowFlow::Crossing exit_c = fl.first_crossing(out.entry, exit_fn, 2000.0, +1);
    if (!exit_c.found) return out;
    out.T = exit_c.t;

    auto diag_fn = [](const Vec2& s) { return std::fabs(s.x) - std::fabs(s.y); };
    SlowFlow::Crossing diag_c = fl.first_crossing(out.entry, diag_fn, out.T, +1);
    if (!diag_c.found) return out;
    out.T1 = diag_c.t;

    out.times.resize(n_samples);
    for (int k = 0; k < n_samples; ++k)
        out.times[k] = out.T * double(k) / double(n_samples - 1);
    out.times[n_samples - 1] = out.T;
    out.states = fl.states_at(out.entry, out.times);
    out.valid = true;
    return out;
}

std::vector<BoundsHarness::Passage> BoundsHarness::sample_passages(
    int count, uint64_t stream) const {
    std::vector<Passage> out(count);
    const uint64_t seed = K_->params().rng_seed();
    parallel_for(count, [&](size_t i) {
        CounterRng rng = rng_for(seed, stream, i);
        // depth log-spaced off the diagonal: shallow to deep passages
        double off = std::exp(rng.uniform(std::log(3e-3), std::log(0.75)));
        out[i] = make_passage(M_PI / 2 - off);
    });
    return out;
}

BoundsHarness::PassageReport BoundsHarness::check_passage_bounds(
    const std::vector<Passage>& ps) const {
    const KatokParams& P = K_->params();
    const double a = P.alpha(), C1 = P.C1(), twoa = std::pow(2.0, a);
    const double expo = -1.0 / (2.0 * a);
    PassageReport rep;
    std::vector<double> logT, logs1;
    for (const Passage& p : ps) {
        if (!p.valid) { ++rep.skipped; continue; }
        Vec2 mid = K_->flow().states_at(p.entry, {p.T1})[0];
        double s1T1 = std::fabs(mid.x);
        if (s1T1 < 1e-12) { ++rep.skipped; continue; }
        ++rep.checked;
        rep.t1_symmetry = std::max(rep.t1_symmetry, std::fabs(p.T1 / p.T - 0.5));

        auto upd = [&](double margin) {
            rep.worst_margin = std::min(rep.worst_margin, margin);
        };
        const auto& ts = p.times;
        for (size_t i = 0; i < ts.size(); ++i) {
            for (size_t j = i; j < ts.size(); ++j) {
                double ta = ts[i], tb = ts[j];
                double s2a = std::fabs(p.states[i].y), s2b = std::fabs(p.states[j].y);
                double s1a = std::fabs(p.states[i].x), s1b = std::fabs(p.states[j].x);
                double dt = tb - ta;
                // lower decay of the contracting coordinate before T1
                if (tb <= p.T1 + 1e-12) {
                    double rhs = s2a * std::pow(1.0 + twoa * C1 * std::pow(s2a, 2 * a) * dt, expo);
                    upd(s2b / rhs - 1.0 + rel_slack);
                }
                // upper decay of the contracting coordinate on [0, T]
                {
                    double rhs = s2a * std::pow(1.0 + C1 * std::pow(s2a, 2 * a) * dt, expo);
                    upd(1.0 - s2b / rhs + rel_slack);
                }
                // lower growth of the expanding coordinate on [0, T]
                {
                    double br = 1.0 - C1 * std::pow(s1a, 2 * a) * dt;
                    upd(br - 1e-12); // bracket positivity is part of the claim
                    if (br > 1e-12) {
                        double rhs = s1a * std::pow(br, expo);
                        upd(s1b / rhs - 1.0 + rel_slack);
                    }
                }
                // upper growth from the final sample backward
                {
                    double s1bb = std::fabs(p.states[j].x);
                    double rhs = s1bb * std::pow(1.0 + C1 * std::pow(s1bb, 2 * a) * dt, expo);
                    upd(1.0 - s1a / rhs + rel_slack);
                }
                // upper growth after T1 anchored at the crossing
                if (ta >= p.T1 - 1e-12) {
                    double br = 1.0 - twoa * C1 * std::pow(s1T1, 2 * a) * (tb - p.T1);
                    upd(br - 1e-12);
                    if (br > 1e-12) {
                        double rhs = s1T1 * std::pow(br, expo);
                        upd(1.0 - s1b / rhs + rel_slack);
                    }
                }
            }
        }
        // total-time estimate
        double tbound = std::pow(P.r0(), a) / (a * twoa * P.log_lambda()) *
                        std::pow(s1T1, -2.0 * a);
        rep.t_estimate_margin =
            std::min(rep.t_estimate_margin, tbound / p.T - 1.0 + rel_slack);

        logT.push_back(std::log(p.T));
        logs1.push_back(std::log(s1T1));
    }
    if (logT.size() >= 8) {
        LinearFit fit = fit_line(logs1, logT);
        rep.slope = fit.slope;
        rep.slope_r2 = fit.r2;
    }
    return rep;
}

BoundsHarness::PairReport BoundsHarness::check_pair_contraction(
    int count, double mu, uint64_t stream) const {
    const KatokParams& P = K_->params();
    const SlowFlow& fl = K_->flow();
    const double a = P.alpha(), C1 = P.C1(), twoa = std::pow(2.0, a);
    const double beta = (1.0 - mu) / std::pow(2.0, a + 2.0);
    // the second display's exponent as derived in the proof (weaker than
    // the displayed beta for a < 1); both margins use this one
    const double beta2 = (1.0 - mu) / (a * std::pow(2.0, a + 2.0));
    PairReport rep;
    std::vector<PairReport> parts(count);
    const uint64_t seed = P.rng_seed();

    parallel_for(count, [&](size_t idx) {
        PairReport& r = parts[idx];
        CounterRng rng = rng_for(seed, stream, idx);
        double off = std::exp(rng.uniform(std::log(8e-3), std::log(0.7)));
        Passage base = make_passage(M_PI / 2 - off);
        if (!base.valid) { ++r.skipped; return; }
        double s20 = base.entry.y;
        // admissible perturbation: stable-cone direction, small relative size
        double f = rng.uniform(-1.0, 1.0);
        double d2 = s20 * ((1.0 - mu) / 72.0) * rng.uniform(0.05, 0.8);
        Vec2 delta{f * mu * d2, d2};
        Vec2 pert = base.entry + delta;

        bool hyp_ok = true;
        auto watch = [&](double, const Vec2& sA, const Vec2& sB) {
            double ds2 = sB.y - sA.y, ds1 = sB.x - sA.x;
            if (!(ds2 > 0.0) || std::fabs(ds1) > mu * ds2 * (1.0 + 1e-9)) hyp_ok = false;
        };

        // pair states at the base sample times
        std::vector<Vec2> As, Bs;
        Vec2 sa = base.entry, sb = pert;
        double cur = 0.0;
        try {
            for (double t : base.times) {
                auto [na, nb] = fl.flow_pair(sa, sb, t - cur, 9.0, watch);
                sa = na; sb = nb;
                cur = t;
                As.push_back(sa);
                Bs.push_back(sb);
            }
        } catch (const Error&) {
            ++r.skipped;
            return;
        }
        if (!hyp_ok) { ++r.skipped; return; }

        // values at the diagonal crossing of the base orbit
        Vec2 a1 = fl.states_at(base.entry, {base.T1})[0];
        Vec2 b1 = fl.flow_pair(base.entry, pert, base.T1, 9.0).second;
        double ds2_T1 = b1.y - a1.y;
        double s1T1 = a1.x;

        ++r.checked;
        for (size_t k = 0; k < base.times.size(); ++k) {
            double t = base.times[k];
            double ds2 = Bs[k].y - As[k].y;
            if (t <= base.T1 + 1e-12) {
                double rhs = (delta.y / s20) * As[k].y *
                             std::pow(1.0 + twoa * C1 * std::pow(s20, 2 * a) * t, -beta);
                r.worst_decay_margin =
                    std::min(r.worst_decay_margin, 1.0 - ds2 / rhs + rel_slack);
            } else {
                double br = 1.0 - twoa * C1 * std::pow(s1T1, 2 * a) * (t - base.T1);
                if (br > 1e-12) {
                    double rhs = (ds2_T1 / s1T1) * As[k].x * std::pow(br, -beta2);
                    r.worst_decay_margin =
                        std::min(r.worst_decay_margin, 1.0 - ds2 / rhs + rel_slack);
                }
            }
        }
        // monotonicity of the relative offset through the crossing
        r.worst_ratio_margin = std::min(
            r.worst_ratio_margin, (delta.y / s20) - (ds2_T1 / a1.y) + 1e-9);
        // final bound
        Vec2 dT = Bs.back() - As.back();
        double rhs = std::sqrt(1.0 + mu * mu) * (As.back().x / s20) * delta.norm();
        r.worst_final_margin =
            std::min(r.worst_final_margin, 1.0 - dT.norm() / rhs + rel_slack);
    });

    for (const PairReport& r : parts) {
        rep.checked += r.checked;
        rep.skipped += r.skipped;
        rep.worst_decay_margin = std::min(rep.worst_decay_margin, r.worst_decay_margin);
        rep.worst_final_margin = std::min(rep.worst_final_margin, r.worst_final_margin);
        rep.worst_ratio_margin = std::min(rep.worst_ratio_margin, r.worst_ratio_margin);
    }
    return rep;
}

double BoundsHarness::annulus_sojourn(const Vec2& entry) const {
    const KatokParams& P = K_->params();
    const double r0 = P.r0();
    // negative strictly inside the annulus, zero on both rims
    auto h = [r0](const Vec2& s) {
        double u = s.norm2();
        return (u - 0.75 * r0) * (u - 0.75 * r0) - 0.0625 * r0 * r0;
    };
    SlowFlow::Crossing c = K_->flow().first_crossing(entry, h, 200.0, +1, 9.0);
    if (!c.found) throw Error("annulus exit not found");
    return c.t;
}

BoundsHarness::TransitReport BoundsHarness::check_transit_bound(
    int count, uint64_t stream) const {
    const KatokParams& P = K_->params();
    TransitReport rep;
    rep.bound = 16.0 * std::pow(2.0, P.alpha()) / P.log_lambda();
    rep.samples = count;
    std::vector<double> times(count, 0.0);
    const uint64_t seed = P.rng_seed();
    parallel_for(count, [&](size_t i) {
        CounterRng rng = rng_for(seed, stream, i);
        double th;
        Vec2 s;
        if (rng.next_double() < 0.5) {
            // inward entry on the outer rim
            th = rng.uniform(M_PI / 4 + 1e-3, M_PI / 2 - 1e-4);
            s = {std::sqrt(P.r0()) * std::cos(th), std::sqrt(P.r0()) * std::sin(th)};
        } else {
            // outward entry on the inner rim
            th = rng.uniform(1e-4, M_PI / 4 - 1e-3);
            s = {std::sqrt(0.5 * P.r0()) * std::cos(th),
                 std::sqrt(0.5 * P.r0()) * std::sin(th)};
        }
        times[i] = annulus_sojourn(s);
    });
    for (double t : times) rep.observed_max = std::max(rep.observed_max, t);
    return rep;
}

BoundsHarness::GammaProductReport BoundsHarness::check_gamma_products(
    int count, double mu, double slack, uint64_t stream) const {
    const KatokParams& P = K_->params();
    const SlowFlow& fl = K_->flow();
    const double a = P.alpha(), C1 = P.C1();
    GammaProductReport rep;
    std::vector<GammaProductReport> parts(count);
    const uint64_t seed = P.rng_seed();
    parallel_for(count, [&](size_t idx) {
        GammaProductReport& r = parts[idx];
        CounterRng rng = rng_for(seed, stream, idx);
        double off = std::exp(rng.uniform(std::log(3e-3), std::log(0.6)));
        Passage p = make_passage(M_PI / 2 - off, 2);
        if (!p.valid) { ++r.skipped; return; }
        int k = int(std::floor(p.T));
        if (k < 1) { ++r.skipped; return; }
        double prod = 1.0;
        Vec2 s = p.entry;
        for (int j = 0; j <= k; ++j) {
            auto [next, J] = fl.flow_with_jacobian(s, 1.0, 9.0);
            prod *= gamma_factor_of(J, mu);
            s = next;
        }
        double bound = std::pow(1.0 + C1 * std::pow(p.entry.y, 2 * a) * k, -1.0 / a);
        ++r.checked;
        r.worst_ratio = prod / bound;
        if (prod > bound * (1.0 + slack)) ++r.violations;
    });
    for (const auto& r : parts) {
        rep.checked += r.checked;
        rep.skipped += r.skipped;
        rep.violations += r.violations;
        rep.worst_ratio = std::max(rep.worst_ratio, r.worst_ratio);
    }
    return rep;
}

Vec2 BoundsHarness::stable_direction(const TorusPoint& x, int n) const {
    // jacobians along the forward orbit, then one backward transport pass
    std::vector<Mat2> J(n);
    TorusPoint p = x;
    for (int i = 0; i < n; ++i) {
        MapEvaluation e = K_->apply_G(p);
        J[i] = e.jacobian;
        p = e.image;
    }
    Vec2 v{0.0, 1.0};
    for (int i = n - 1; i >= 0; --i) {
        v = J[i].inverse() * v;
        v = v / v.norm();
    }
    if (v.y < 0) v = v * -1.0;
    return v;
}

BoundsHarness::SummabilityReport BoundsHarness::check_summability(
    const TorusPoint& x, int tau, double mu, double eps) const {
    SummabilityReport rep;
    rep.tau = tau;
    if (tau < 1) return rep;
    Vec2 es = stable_direction(x);
    Vec2 eu = eigen_unstable(), st = eigen_stable();
    Vec2 offset = (es.x * eu + es.y * st) * eps; // eigen frame -> torus frame
    TorusPoint y(x.x + offset.x, x.y + offset.y);
    double d0 = torus_distance(x, y);
    if (d0 <= 0) return rep;
    rep.hypotheses_met = true;

    TorusPoint xa = x, ya = y;
    double gamma_running = 1.0;
    const int dirs = 32;
    for (int n = 0; n < tau; ++n) {
        MapEvaluation ea = K_->apply_G(xa);
        MapEvaluation eb = K_->apply_G(ya);
        const Mat2& A = ea.jacobian;
        const Mat2& B = eb.jacobian;
        double dn = 0.0;
        for (int i = 0; i <= dirs; ++i) {
            double th = std::atan(mu) * (-1.0 + 2.0 * double(i) / dirs);
            Vec2 v{std::cos(th), std::sin(th)};
            Vec2 Av = A * v;
            Vec2 Dv = Av - B * v;
            dn = std::max(dn, Dv.norm() / Av.norm());
        }
        rep.sum_delta += dn / d0;
        gamma_running *= gamma_factor_of(A, mu);
        rep.sum_gamma_products += gamma_running;
        xa = ea.image;
        ya = eb.image;
    }
    rep.gamma_product = gamma_running;
    return rep;
}

} // namespace katoklab
