#include "magschro/mixed_norms.hpp"

#include "magschro/diagnostics.hpp"
#include "magschro/fourier.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace magschro {

bool is_admissible(double q, double r, int n) {
    if (q < 2 || r < 2) throw InvalidArgument("Strichartz exponents must be >= 2");
    if (n == 2 && q == 2 && std::isinf(r)) return false;
    double lhs = (std::isinf(q) ? 0.0 : 2.0 / q) + (std::isinf(r) ? 0.0 : n / r);
    return std::abs(lhs - n / 2.0) < 1e-12;
}

std::vector<AdmissiblePair> admissible_pairs(int n, int count) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    if (count < 1) return {};
    std::vector<AdmissiblePair> out;
    // parametrize by 1/r from 1/2 down to the endpoint value
    double inv_end = n >= 3 ? (n - 2.0) / (2.0 * n) : (n == 2 ? 1.0 / 16 : 0.0);
    for (int i = 0; i < count; ++i) {
        double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        double inv_r = 0.5 + s * (inv_end - 0.5);
        double r = inv_r == 0 ? INFINITY : 1.0 / inv_r;
        double inv_q = 0.5 * (n / 2.0 - n * inv_r);
        double q = inv_q <= 1e-15 ? INFINITY : 1.0 / inv_q;
        out.push_back({q, r});
    }
    return out;
}

double time_norm(std::span<const double> v, std::span<const double> t, double q) {
    if (v.size() != t.size()) throw InvalidArgument("time samples mismatch");
    if (v.empty()) return 0;
    if (std::isinf(q)) {
        double m = 0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    if (v.size() == 1) return std::abs(v[0]);
    std::vector<double> terms(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        terms[i] = 0.5 * (t[i + 1] - t[i]) * (std::pow(std::abs(v[i]), q) + std::pow(std::abs(v[i + 1]), q));
    return std::pow(pairwise_sum(terms), 1.0 / q);
}

double lqlr_norm(const SpaceTimeField& u, double q, double r) {
    std::vector<double> per(u.slice_count());
    for (std::size_t i = 0; i < per.size(); ++i) per[i] = lp_norm(u.grid, u.slices[i], r);
    return time_norm(per, u.times, q);
}

double anisotropic_slice(const Grid& g, std::span<const double> magnitude, double r_outer, double p_inner) {
    return axis_mixed_norm(g, magnitude, p_inner, r_outer);
}

double anisotropic_norm(const SpaceTimeField& u, double q, double r_outer, double p_inner, const Rotation& U,
                        const PathSpec& path) {
    const Grid& g = u.grid;
    if (g.dim < 2) throw InvalidArgument("anisotropic norms need n >= 2");
    std::vector<std::array<double, 3>> shifts = path.translations;
    if (path.mode == PathMode::fixed_origin || shifts.empty()) shifts = {{0.0, 0.0, 0.0}};
    std::vector<double> per(u.slice_count());
    std::vector<double> mag(g.size());
    for (std::size_t t = 0; t < per.size(); ++t) {
        double best = 0;
        for (const auto& a : shifts) {
            bool zero = a[0] == 0 && a[1] == 0 && a[2] == 0;
            ComplexField s = zero ? u.slices[t] : translate_field(g, u.slices[t], std::span<const double>(a.data(), g.dim));
            s = rotate_field(g, s, U);
            for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(s[i]);
            best = std::max(best, anisotropic_slice(g, mag, r_outer, p_inner));
        }
        per[t] = best;
    }
    return time_norm(per, u.times, q);
}

RotationSampler make_rotation_sampler(int n, int count, std::uint64_t seed, int refinement) {
    RotationSampler s;
    s.n = n;
    s.seed = seed;
    s.refinement = refinement;
    if (n == 1) {
        s.samples = {Rotation::identity(1)};
        return s;
    }
    if (n == 2) {
        s.angle_spacing = kPi / count;
        for (int i = 0; i < count; ++i) s.samples.push_back(Rotation::planar(i * s.angle_spacing));
        return s;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N01;
    s.samples.push_back(Rotation::identity(3));
    while (static_cast<int>(s.samples.size()) < count) {
        double w = N01(rng), x = N01(rng), y = N01(rng), z = N01(rng);
        s.samples.push_back(Rotation::from_quaternion(w, x, y, z));
    }
    return s;
}

RotationSup sup_over_rotations(const std::function<double(const Rotation&)>& F, const RotationSampler& s) {
    RotationSup best;
    best.value = -INFINITY;
    for (const auto& U : s.samples) {
        double v = F(U);
        ++best.evaluations;
        if (v > best.value) {
            best.value = v;
            best.argmax = U;
        }
    }
    if (s.n == 2 && s.refinement > 0 && s.samples.size() > 1) {
        // golden-section search on the bracket around the best sample
        double c = std::atan2(best.argmax(1, 0), best.argmax(0, 0));
        double lo = c - s.angle_spacing, hi = c + s.angle_spacing;
        const double gr = 0.5 * (std::sqrt(5.0) - 1);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = F(Rotation::planar(x1)), f2 = F(Rotation::planar(x2));
        best.evaluations += 2;
        for (int it = 0; it < 6 * s.refinement; ++it) {
            if (f1 > f2) {
                hi = x2, x2 = x1, f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = F(Rotation::planar(x1));
            } else {
                lo = x1, x1 = x2, f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = F(Rotation::planar(x2));
            }
            ++best.evaluations;
        }
        for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}})
            if (f > best.value) {
                best.value = f;
                best.argmax = Rotation::planar(x);
            }
    } else if (s.n == 3 && s.refinement > 0) {
        std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> N01;
        double radius = 0.3;
        for (int round = 0; round < 2 * s.refinement; ++round, radius *= 0.5)
            for (int j = 0; j < 6; ++j) {
                auto P = Rotation::from_quaternion(1.0, radius * N01(rng), radius * N01(rng), radius * N01(rng));
                auto U = best.argmax.compose(P);
                double v = F(U);
                ++best.evaluations;
                if (v > best.value) {
                    best.value = v;
                    best.argmax = U;
                }
            }
    }
    return best;
}

std::array<double, 3> xdot_anisotropic_exponents(int n) {
    if (n == 2) return {4.0, INFINITY, 2.0};
    if (n == 3) return {4.0, 4.0, 2.0};
    return {2.0, 2.0 * (n - 1) / (n - 3.0), 2.0};
}

XdotResult xdot_norm(const SpaceTimeField& u, double alpha, const XdotOptions& opt) {
    const Grid& g = u.grid;
    XdotResult res;
    res.range = opt.range ? *opt.range : representable_band_range(g);
    auto pairs = admissible_pairs(g.dim, opt.pair_count);
    {
        std::ostringstream os;
        os << "Strichartz supremum over a finite sample of " << pairs.size() << " admissible pairs";
        warn("finite-admissible-sample", os.str());
    }
    auto ex = xdot_anisotropic_exponents(g.dim);
    RotationSampler sampler = opt.sampler;
    if (sampler.n != g.dim) sampler = make_rotation_sampler(g.dim, g.dim == 2 ? 8 : 16);
    double s_acc = 0, a_acc = 0;
    for (int k = res.range.k_min; k <= res.range.k_max; ++k) {
        auto uk = band_piece(u, k);
        double S = 0;
        for (const auto& p : pairs) S = std::max(S, lqlr_norm(uk, p.q, p.r));
        double w = std::pow(2.0, 2 * alpha * k);
        s_acc += w * S * S;
        if (g.dim >= 2) {
            auto sup = sup_over_rotations([&](const Rotation& U) { return anisotropic_norm(uk, ex[0], ex[1], ex[2], U); },
                                          sampler);
            a_acc += w * sup.value * sup.value;
        }
    }
    res.strichartz_part = std::sqrt(s_acc);
    res.anisotropic_part = std::sqrt(a_acc);
    res.value = std::sqrt(s_acc + a_acc);
    return res;
}

}  // namespace magschro
