#pragma once

#include "magschro/cutoffs.hpp"
#include "magschro/grid.hpp"

#include <functional>
#include <optional>

namespace magschro {

struct BandRange {
    int k_min = 0;
    int k_max = -1;
    bool contains(int k) const { return k >= k_min && k <= k_max; }
    int count() const { return k_max >= k_min ? k_max - k_min + 1 : 0; }
};

// 2^k ∈ [4/L, Nyquist/4].
BandRange representable_band_range(const Grid& g);
// Every k for which φ(2^{-k}|ξ|) is nonzero on some lattice frequency.
BandRange lattice_band_range(const Grid& g, const CutoffPair& c = default_cutoffs());

std::vector<double> band_multiplier(const Grid& g, int k, const CutoffPair& c = default_cutoffs());
std::vector<double> below_multiplier(const Grid& g, int k, const CutoffPair& c = default_cutoffs());

// Checked against the representable range.
ComplexField project_band(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c = default_cutoffs());
ComplexField project_below(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c = default_cutoffs());
ComplexField project_fat(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c = default_cutoffs());
// Same multipliers without the range check (used on lattice bands).
ComplexField band_piece(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c = default_cutoffs());
ComplexField below_piece(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c = default_cutoffs());

struct BandDecomposition {
    Grid grid;
    BandRange range;
    std::vector<ComplexField> pieces;  // pieces[k - k_min]
    ComplexField low_residual;         // P_{<k_min} f (includes ξ = 0)
    ComplexField high_residual;        // (1 - P_{<=k_max}) f

    const ComplexField& piece(int k) const { return pieces.at(k - range.k_min); }
    ComplexField reconstruct() const;
};

BandDecomposition decompose(const Grid& g, std::span<const cplx> f, BandRange range,
                            const CutoffPair& c = default_cutoffs());

// Space-time band piece P_k u, slice by slice.
SpaceTimeField band_piece(const SpaceTimeField& u, int k, const CutoffPair& c = default_cutoffs());
SpaceTimeField below_piece(const SpaceTimeField& u, int k, const CutoffPair& c = default_cutoffs());

// Exact four-way split of P_k(fg) with f = f_lo + f_hi, f_lo = P_{<=k-4} f:
//   low_high   = f_lo · P_k g
//   commutator = P_k(f_lo g) - f_lo P_k g
//   high_low   = P_k(f_hi · P_{<=k-4} g)
//   high_high  = P_k(f_hi · (g - P_{<=k-4} g))
struct ParaproductGroups {
    ComplexField low_high, commutator, high_low, high_high;
    ComplexField direct;  // P_k(fg)
    ComplexField group_sum() const;
};

ParaproductGroups paraproduct_split(const Grid& g, std::span<const cplx> f, std::span<const cplx> h, int k,
                                    const CutoffPair& c = default_cutoffs());

// Rectangle in frequency space.
struct FrequencyBox {
    std::vector<double> center;
    std::vector<double> half_width;
    double volume() const;
    bool contains(std::span<const double> xi) const;
};

// ‖f‖_q / (|Q|^{1/p - 1/q} ‖f‖_p).
double bernstein_ratio(const Grid& g, std::span<const cplx> f, const FrequencyBox& Q, double p, double q);
// ‖f‖_{L^{p1}_{x₂..}L^r_{x₁}} / (2^{k(n-1)(1/p2 - 1/p1)} ‖f‖_{L^{p2}_{x₂..}L^r_{x₁}}), spectrum in 2^k-annulus.
double mixed_bernstein_ratio(const Grid& g, std::span<const cplx> f, int k, double p1, double p2, double r);

using SpaceTimeNorm = std::function<double(const SpaceTimeField&)>;

struct BesovResult {
    double value = 0;
    std::vector<double> band_norms;  // unweighted ‖u_k‖ for k in range
    double residual_norm = 0;        // norm of the two residual pieces
    BandRange range;
};

// (Σ_k 2^{2ks} ‖u_k‖²)^{1/2}; default range is the representable one.
BesovResult besov_l2_norm(const SpaceTimeField& u, double s, const SpaceTimeNorm& norm,
                          std::optional<BandRange> range = std::nullopt, const CutoffPair& c = default_cutoffs());

struct SequenceBound {
    double lhs = 0;
    double ratio = 0;        // lhs / (‖a‖_∞‖b‖₂), 0 if the denominator vanishes
    double schur_bound = 0;  // 2^{2h}/(1 - 2^{-h}), valid for every pair
};

// l runs over l0 .. l0 + size - 1; the k-sum includes the closed-form tail k < l0 + 2.
SequenceBound sequence_bound_check(std::span<const double> a, std::span<const double> b, double h, int l0 = 0);

}  // namespace magschro
