#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace coherence {

struct Bracket {
    double lo;
    double hi;
};

/// Sub-intervals of [lo, hi] (sampled at `samples` points) whose endpoints
/// have opposite signs of f, or where f vanishes exactly at a sample.
inline std::vector<Bracket> scan_brackets(const std::function<double(double)>& f, double lo, double hi,
                                          int samples) {
    if (samples < 2) throw std::invalid_argument("bracket scan needs at least two samples");
    if (!(hi > lo)) throw std::invalid_argument("bracket scan needs lo < hi");
    std::vector<Bracket> out;
    double x_prev = lo;
    double f_prev = f(lo);
    for (int i = 1; i < samples; ++i) {
        const double x = lo + (hi - lo) * i / (samples - 1);
        const double fx = f(x);
        if (std::isfinite(f_prev) && std::isfinite(fx)) {
            if (f_prev == 0.0) out.push_back({x_prev, x_prev});
            else if ((f_prev < 0.0) != (fx < 0.0) && fx != 0.0) out.push_back({x_prev, x});
        }
        x_prev = x;
        f_prev = fx;
    }
    if (f_prev == 0.0) out.push_back({x_prev, x_prev});
    return out;
}

/// Bisection on a sign-change bracket until the interval is below `xtol`.
inline double bisect(const std::function<double(double)>& f, Bracket br, double xtol = 1e-12) {
    double lo = br.lo, hi = br.hi;
    if (lo == hi) return lo;
    double flo = f(lo);
    if (flo == 0.0) return lo;
    if (const double fhi = f(hi); fhi == 0.0) return hi;
    else if ((flo < 0.0) == (fhi < 0.0)) throw std::invalid_argument("bisect: no sign change on bracket");
    for (int iter = 0; iter < 200 && hi - lo > xtol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimization of a unimodal f on [lo, hi].
inline double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double xtol = 1e-13) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int iter = 0; iter < 300 && b - a > xtol; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace coherence
