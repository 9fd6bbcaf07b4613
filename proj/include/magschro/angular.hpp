#pragma once

#include "magschro/cutoffs.hpp"
#include "magschro/grid.hpp"

#include <array>
#include <cstdint>

namespace magschro {

// Directions θ_j^m on S^{n-1}, n = 2 or 3. n = 2: ⌈2π·2^m⌉ uniform angles.
// n = 3: latitude rings of geodesic spacing 0.65·2^{-m}.
struct AngularNet {
    int n = 2;
    int m = 0;
    std::vector<std::array<double, 3>> directions;
    double radius() const;  // 2^{-m}
    std::size_t count() const { return directions.size(); }
};
AngularNet angular_net(int n, int m);

struct NetAudit {
    double covering_radius = 0;  // max over samples of the chord distance to the net, in units of 2^{-m}
    double separation = 0;       // min pairwise chord distance, in units of 2^{-m}
    int overlap = 0;             // max number of balls B(θ_j, 2^{-m}) holding a sample
    double count_constant = 0;   // count / 2^{m(n-1)}
};
NetAudit audit_net(const AngularNet& net, int samples = 1000, std::uint64_t seed = 7);

// ψ_j = b_j / Σ_i b_i with b_j(ω) = b(2^m|ω - θ_j|), b ≡ 1 on [0, 1/2], 0 beyond 1,
// so supp ψ_j ⊂ B(θ_j, 2^{-m}).
class CapPartition {
public:
    explicit CapPartition(AngularNet net);
    const AngularNet& net() const { return net_; }
    // Nonzero (j, ψ_j(ω)) at a unit vector ω.
    std::vector<std::pair<std::size_t, double>> evaluate(const std::array<double, 3>& omega) const;
    double value(std::size_t j, const std::array<double, 3>& omega) const;
    std::size_t nearest(const std::array<double, 3>& omega) const;

private:
    AngularNet net_;
};
CapPartition cap_partition(const AngularNet& net);

struct PartitionAudit {
    double max_sum_error = 0;     // max |Σ_j ψ_j - 1| over the samples
    double derivative_bound = 0;  // max |∇_ω ψ_j|·2^{-m} (finite differences)
};
PartitionAudit audit_partition(const CapPartition& p, int samples = 1000, std::uint64_t seed = 11);

// Uniform random unit vectors in R^n.
std::vector<std::array<double, 3>> random_sphere_points(int n, int count, std::uint64_t seed);

// lhs = sup_x Σ_{m} Σ_j ∫|H(x + zθ_j^m)| φ(2^{-l}z) dz, l = m - k, against
// 2^{k(n-1)}‖H‖₁. The sup runs over x = c + 2^{-k}h·(i, j) around the peak c of
// |H|; |H| comes from spectral upsampling plus bilinear interpolation.
struct RayBoundOptions {
    int m_min = 1, m_max = 2;
    int upsample = 2;
    double x_step = 0.25;   // in units of 2^{-k}
    double z_step = 1.0 / 32;  // in units of 2^{-k}
};
struct RayBoundResult {
    double lhs = 0, rhs = 0, ratio = 0;
    std::vector<int> truncated_m;  // m whose ray support 1.75·2^{l} exceeds L/2
    std::array<double, 3> argmax{0, 0, 0};
};
RayBoundResult pointwise_ray_bound_check(const Grid& g, std::span<const cplx> H, int k, const RayBoundOptions& opt = {},
                                         const CutoffPair& cut = default_cutoffs());

// I(t,x) = ∫ e^{-4π²it|ξ|² + 2πiξ·x} Π_j ψ_j(ξ/|ξ|) Ω(ξ) dξ (n = 2). With
// ǧ the inverse transform of the amplitude and h_t = e^{i|y|²/4t}ǧ,
// sup_x|I(t,x)| = (4πt)^{-n/2} sup_ζ |ĥ_t(ζ)|, so one FFT per t.
// The fixed-ξ₁ variant integrates over ξ₂ only at ξ₁ = xi1.
struct Cap {
    std::array<double, 3> theta{1, 0, 0};
    int k = 1;  // net scale m
};
struct DecayOptions {
    int points = 2048;
    double length = 128;
    std::vector<double> times{1, 2, 4, 8, 16};
    bool fixed_xi1 = false;
    double xi1 = 1.0;
    // ∫_{|y|>R}|ǧ| allowed outside the resolved chirp, relative to max amplitude
    double tail_tolerance = 1e-3;
};
struct DecayTable {
    std::vector<double> times, sup;  // sup_x |I(t, ·)|
    double slope = 0, intercept = 0; // log sup = intercept + slope·log t
    double expected_slope = 0;       // -n/2, or -(n-1)/2 for the fixed-ξ₁ variant
    double at_zero = 0;              // I(0, 0) = ∫ amplitude
    double scaled_max = 0;           // max_t sup·t^{-expected_slope}
    double tail_radius = 0;          // ∫_{|y|>R}|ǧ| = tail_tolerance·max amplitude
};
DecayTable cap_oscillatory_decay(const std::vector<Cap>& caps, const AnnulusCutoff& omega, const DecayOptions& opt = {});

}  // namespace magschro
