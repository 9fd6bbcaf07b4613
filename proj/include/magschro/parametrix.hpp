#pragma once

#include "magschro/cutoffs.hpp"
#include "magschro/solver.hpp"

#include <map>
#include <optional>

namespace magschro {

// Ray profiles: χ(cz), χ'(cz), χ''(cz) on z > 0.
enum class RayProfile { chi, chi_d1, chi_d2 };

// W(c, s) = ∫_0^∞ e^{2πizs} profile(cz) dz. Closed form on the flat part of χ,
// Gauss-Legendre panels on the glue.
cplx ray_weight(RayProfile p, double c, double s, const CutoffPair& cut = default_cutoffs());

// ∫_0^∞ f(x + zθ) profile(cz) dz on the torus, exact per Fourier mode.
ComplexField ray_transform(const Grid& g, std::span<const cplx> f, std::span<const double> theta, double c,
                           RayProfile p, const CutoffPair& cut = default_cutoffs());
// Same integral from Fourier-interpolated samples f(x + zθ): composite
// Gauss-Legendre panels of length `step` along the ray.
ComplexField ray_transform_quadrature(const Grid& g, std::span<const cplx> f, std::span<const double> theta, double c,
                                      RayProfile p, double step, const CutoffPair& cut = default_cutoffs());

// Target band k_f = 0 throughout (the problem is rescaled to it).
struct PhaseOptions {
    // σ⁰ is the displayed ray integral divided by kappa (see parametrix_residual).
    double kappa = 1.0;
    double amplitude = 1.0;  // scales A
};

// σ = σ⁰ + σ¹ held as Fourier coefficients over the (few) modes of A.
// σ⁰(t,x,ξ) = κ⁻¹ Σ_k ∫_0^∞ A_k(t, x+zθ)·θ χ(2^{2k}z) dz,  θ = ξ/|ξ|
// σ¹(t,x,ξ) = 2πi Σ_k 2^{2k} ∫_0^∞ Δ⁻¹A_k(t, x+zθ)·ξ χ'(2^{2k}z) dz
class PhaseField {
public:
    PhaseField(const Grid& g, const PotentialSource& A, const std::vector<double>& times, PhaseOptions opt = {},
               const CutoffPair& cut = default_cutoffs());

    const Grid& grid() const { return g_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t slice_count() const { return times_.size(); }
    std::size_t mode_count() const { return modes_.size() / g_.dim; }
    const PhaseOptions& options() const { return opt_; }
    std::vector<int> bands() const;  // bands of A entering the sums
    bool wraps() const { return wraps_; }

    // Ray weights W(2^{2k}, η_m·θ) for the three profiles, [mode * bands + band].
    struct XiWeights {
        std::vector<double> xi;
        std::vector<cplx> w0, w1, w2;
    };
    XiWeights weights(std::span<const double> xi) const;

    // Coefficient of e^{2πiη_m·x}/L^n for each mode m.
    std::vector<cplx> sigma0_coeffs(std::size_t slice, const XiWeights& w, bool time_derivative = false) const;
    std::vector<cplx> sigma1_coeffs(std::size_t slice, const XiWeights& w, bool time_derivative = false) const;
    // ⟨∇σ¹, ξ⟩ from the χ'' form: -2πi Σ_k 2^{2k} ∫ Ã_k(x+zθ)·ξ|ξ| χ''(2^{2k}z) dz, Ã_k = 2^{2k}Δ⁻¹A_k.
    std::vector<cplx> e1_coeffs(std::size_t slice, const XiWeights& w) const;
    std::span<const double> mode(std::size_t m) const { return {modes_.data() + m * g_.dim, std::size_t(g_.dim)}; }

    // Synthesis on the lattice from mode coefficients (optionally after a
    // multiplier per mode, e.g. 2πiη_a).
    ComplexField synthesize(std::span<const cplx> coeffs) const;
    ComplexField synthesize(std::span<const cplx> coeffs, const std::function<cplx(std::span<const double>)>& mult) const;

    // Raw syntheses; the imaginary part of σ⁰ (real part of σ¹) is rounding.
    ComplexField sigma0(std::size_t slice, std::span<const double> xi) const;
    ComplexField sigma1(std::size_t slice, std::span<const double> xi) const;
    // Samples of A on the slice (what the phase was built from).
    const std::vector<RealField>& potential(std::size_t slice) const { return A_[slice]; }
    const std::vector<RealField>& potential_dt(std::size_t slice) const { return dA_[slice]; }

    // σ scaled by a (A -> aA).
    PhaseField scaled(double a) const;
    // Zero phase on the same lattice.
    static PhaseField zero(const Grid& g, const std::vector<double>& times, PhaseOptions opt = {});

private:
    PhaseField() = default;
    Grid g_;
    std::vector<double> times_;
    PhaseOptions opt_;
    CutoffPair cut_{};
    std::vector<double> modes_;                 // mode_count × dim
    std::vector<std::vector<cplx>> coef_, dcoef_;  // [slice][mode * dim + a]
    std::vector<std::vector<RealField>> A_, dA_;
    std::vector<int> bands_;
    std::vector<double> phi_;        // [mode * bands + band]
    std::vector<ComplexField> waves_;  // e^{2πiη_m·x}
    bool wraps_ = false;
};

// Validates the band limit (spectrum of A inside |η| <= 1.75·2^{-4}, mean zero) and warns
// "ray-wrap" when a ray support 1.75·2^{-2k} exceeds L/2.
PhaseField build_sigma(const Grid& g, const PotentialSource& A, const std::vector<double>& times,
                       PhaseOptions opt = {}, const CutoffPair& cut = default_cutoffs());

// max over (slice, x, ξ) of |Δσ¹ + 2πi(κ⟨∇σ⁰,ξ⟩ + A·ξ)| / max(1, max|A·ξ|).
struct PhaseIdentityResult {
    double residual = 0;
    double scale = 0;
    double relative = 0;
};
PhaseIdentityResult phase_identity_residual(const PhaseField& phase, const std::vector<std::vector<double>>& xi);
// max |⟨∇σ¹,ξ⟩ - χ''-form| / max|⟨∇σ¹,ξ⟩|.
double e1_identity_residual(const PhaseField& phase, const std::vector<std::vector<double>>& xi);

// sup over t, x and the directions of f's spectral support of |σ⁰|.
double phase_size(const PhaseField& phase, std::span<const cplx> f, const AnnulusCutoff& omega);

// Directions ξ/|ξ| of 16 (or `count`) uniformly spaced angles scaled to |ξ| = r (n = 2).
std::vector<std::vector<double>> xi_ring(int count, double r);

struct ParametrixOptions {
    double budget = 4e9;            // cap on N^n · |annulus modes| · slices
    double spectral_cut = 1e-14;    // drop modes with |Ωf̂| below this times the max
    double flat_tolerance = 1e-12;  // relative ‖f̂‖ outside {Ω = 1} before "omega-not-flat"
    bool abort_on_disagreement = true;
};

// v = Λf = ∫ e^{iσ} e^{-4π²it|ξ|²} e^{2πiξ·x} Ω f̂ dξ by direct summation.
// order >= 0 replaces e^{iσ} with Σ_{α<=order} (iσ)^α/α!.
SpaceTimeField apply_parametrix(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                int order = -1, const ParametrixOptions& opt = {});
SpaceTimeField taylor_parametrix(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                 int order, const ParametrixOptions& opt = {});
// i^α/α! Λ^α f for α = 0..order.
std::vector<SpaceTimeField> taylor_terms(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                         int order, const ParametrixOptions& opt = {});

// ℒv two ways: (a) ∂_t v - iΔv + A·∇v from derivatives of v (7-point time
// differences, spectral space derivatives); (b) the integrand
//   i∂_tσ + Δσ⁰ + (4π - 2πκ)i⟨∇σ⁰,ξ⟩ + 4πi⟨∇σ¹,ξ⟩ + i[(∇σ)² + A·∇σ]
// summed over ξ, which uses Δσ¹ = -2πi(κ⟨∇σ⁰,ξ⟩ + A·ξ).
struct ParametrixResidual {
    SpaceTimeField numeric, analytic;
    double numeric_norm = 0, analytic_norm = 0;  // L¹L²
    double agreement = 0;                        // ‖a - b‖_{L¹L²} / ‖b‖_{L¹L²}
    std::map<std::string, double> term_norms;    // L¹L² norm of each integrand term
};
// A is the potential the phase was built from (amplitude applied).
ParametrixResidual parametrix_residual(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                       const ParametrixOptions& opt = {});
// The phase's potential samples as a source (defined at the phase times only).
PotentialSource phase_potential(const PhaseField& phase);

// Unit-L² field with f̂ = exp(1 - 1/(1 - |ξ-c|²/ρ²)) on |ξ-c| < ρ.
ComplexField spectral_bump_packet(const Grid& g, std::span<const double> center, double radius);

// Σ_k 2^{2ks}‖E^k‖²_{L¹L²} against Σ_k 2^{2ks}‖u_k‖²_{L^∞L²} over the lattice bands.
struct BesovErrorBound {
    double lhs = 0, rhs = 0;
    double constant = 0;  // lhs / (ε² rhs)
    std::vector<int> bands;
    std::vector<double> error_norms;  // ‖E^k‖_{L¹L²}
};
BesovErrorBound besov_error_bound(const SpaceTimeField& u, const PotentialSource& A, double s, double eps,
                                  const CutoffPair& cut = default_cutoffs());

}  // namespace magschro
