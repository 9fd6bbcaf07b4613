#pragma once

#include "magschro/littlewood_paley.hpp"
#include "magschro/rotation.hpp"

#include <cstdint>
#include <functional>

namespace magschro {

struct AdmissiblePair {
    double q = INFINITY;
    double r = 2;
};

// 2/q + n/r = n/2, q, r >= 2, (q, r, n) != (2, ∞, 2). Throws if q or r < 2.
bool is_admissible(double q, double r, int n);
// count pairs spread over r from 2 to the endpoint (n >= 3), to r = 16 (n = 2), to ∞ (n = 1).
std::vector<AdmissiblePair> admissible_pairs(int n, int count);

// Time quadrature (trapezoid on the slice times, max for q = ∞).
double time_norm(std::span<const double> values, std::span<const double> times, double q);
double lqlr_norm(const SpaceTimeField& u, double q, double r);

enum class PathMode { fixed_origin, per_time_sup };

struct PathSpec {
    PathMode mode = PathMode::fixed_origin;
    // Translations x searched per time slice in per_time_sup mode.
    std::vector<std::array<double, 3>> translations{{0.0, 0.0, 0.0}};
};

// ‖u(t, x(t) + Uz)‖_{L^q_t L^{r_outer}_{z₂..z_n} L^{p_inner}_{z₁}}.
double anisotropic_norm(const SpaceTimeField& u, double q, double r_outer, double p_inner, const Rotation& U,
                        const PathSpec& path = {});
// Per-slice value of a rotated magnitude field (already sampled at Uz).
double anisotropic_slice(const Grid& g, std::span<const double> magnitude, double r_outer, double p_inner);

struct RotationSampler {
    int n = 2;
    std::vector<Rotation> samples;
    std::uint64_t seed = 0;
    int refinement = 1;
    double angle_spacing = 0;  // n = 2 only
};

// n = 2: uniform angles in [0, π). n = 3: identity plus seeded uniform quaternions.
RotationSampler make_rotation_sampler(int n, int count, std::uint64_t seed = 1, int refinement = 1);

struct RotationSup {
    double value = 0;
    Rotation argmax;
    int evaluations = 0;
};

RotationSup sup_over_rotations(const std::function<double(const Rotation&)>& functional, const RotationSampler& s);

struct XdotOptions {
    int pair_count = 6;
    std::optional<BandRange> range;
    RotationSampler sampler = make_rotation_sampler(2, 8);
};

struct XdotResult {
    double value = 0;
    double strichartz_part = 0;
    double anisotropic_part = 0;
    BandRange range;
};

// Anisotropic exponents per dimension: n = 2 (4, ∞, 2), n = 3 (4, 4, 2), n >= 4 (2, 2(n-1)/(n-3), 2).
std::array<double, 3> xdot_anisotropic_exponents(int n);
XdotResult xdot_norm(const SpaceTimeField& u, double alpha, const XdotOptions& opt = {});

}  // namespace magschro
