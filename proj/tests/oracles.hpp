#pragma once

#include "magschro/grid.hpp"

#include <cmath>
#include <random>

namespace oracle {

using magschro::cplx;
using magschro::kPi;

// e^{itΔ} applied to exp(-π|x-x0|²/w²) e^{2πi p·x}, evaluated analytically on ℝ^n.
inline cplx free_gaussian(std::span<const double> x, double t, double w, std::span<const double> p,
                          std::span<const double> x0) {
    cplx out = 1.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        double y = x[d] - x0[d];
        cplx a(kPi * w * w, 4 * kPi * kPi * t);
        cplx b(2 * kPi * w * w * p[d], 2 * kPi * y);
        double c = kPi * w * w * p[d] * p[d];
        out *= w * std::sqrt(kPi / a) * std::exp(b * b / (4.0 * a) - c) * std::polar(1.0, 2 * kPi * p[d] * x0[d]);
    }
    return out;
}

inline magschro::ComplexField random_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N01;
    magschro::ComplexField f(n);
    for (auto& v : f) v = {N01(rng), N01(rng)};
    return f;
}

inline double max_rel_error(std::span<const cplx> a, std::span<const cplx> b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return den > 0 ? num / den : num;
}

inline double rel_l2_error(std::span<const cplx> a, std::span<const cplx> b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace oracle
