#ifndef KATOKLAB_STATS_HPP
#define KATOKLAB_STATS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace katoklab {

// Pairwise summation: deterministic and accurate regardless of how the
// values were produced (threaded loops fill a sample-indexed buffer first).
inline double pairwise_sum(const double* v, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

inline double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v) / double(v.size());
}

inline double variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    std::vector<double> sq(v.size());
    for (size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
    return pairwise_sum(sq) / double(v.size() - 1);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i]; sy += ys[i];
        sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i]; syy += ys[i] * ys[i];
    }
    double dn = double(n);
    double cxx = sxx - sx * sx / dn;
    double cxy = sxy - sx * sy / dn;
    double cyy = syy - sy * sy / dn;
    LinearFit f;
    f.slope = cxy / cxx;
    f.intercept = (sy - f.slope * sx) / dn;
    f.r2 = (cyy > 0) ? (cxy * cxy) / (cxx * cyy) : 1.0;
    return f;
}

// Runs fn(i) for i in [0, n) over a fixed-size thread pool. Results must be
// written to pre-allocated sample-indexed storage by the callee.
void parallel_for(size_t n, const std::function<void(size_t)>& fn, unsigned threads = 0);

unsigned default_thread_count();
void set_default_thread_count(unsigned n);

} // namespace katoklab

#endif
