#pragma once

#include "magschro/potentials.hpp"

#include <functional>

namespace magschro {

// A(t) as seen by the integrator.
struct PotentialSource {
    Grid grid;
    std::function<std::vector<RealField>(double)> at;
    bool zero = false;
    bool divergence_free = false;

    static PotentialSource none(const Grid& g);
    static PotentialSource constant(const Grid& g, const std::array<double, 3>& a);
    static PotentialSource preset(const Grid& g, const PresetParams& p);
    // 4-point Lagrange interpolation between slices.
    static PotentialSource sampled(const VectorPotential& A);
    static PotentialSource scaled(const PotentialSource& s, double a);
};

struct ForcingSource {
    std::function<ComplexField(double)> at;
    bool zero = true;

    static ForcingSource none();
    static ForcingSource callable(std::function<ComplexField(double)> f);
    static ForcingSource sampled(const SpaceTimeField& F);
    static ForcingSource scaled(const ForcingSource& s, cplx a);
};

struct SolverConfig {
    double dt = 1.0 / 64;
    double cfl_safety = 1.0;  // dt <= safety·dx / max(1, ‖A‖_∞)
    bool dealias = true;      // 2/3 rule on A·∇u
};

// Lawson integrating-factor RK4 for ∂_t u = iΔu - A·∇u + F, carried in the
// spectral variable. Negative h runs backwards.
class Integrator {
public:
    Integrator(const Grid& g, PotentialSource A, ForcingSource F, SolverConfig cfg);
    // Spectrum (unnormalized FFT) advanced from t by h.
    void step(ComplexField& spec, double t, double h) const;
    // Physical field advanced from s to t in ceil(|t-s|/dt) equal steps.
    ComplexField advance(std::span<const cplx> f, double s, double t) const;
    const Grid& grid() const { return g_; }
    const SolverConfig& config() const { return cfg_; }
    bool forced() const { return !F_.zero; }
    const ForcingSource& forcing() const { return F_; }
    const PotentialSource& potential() const { return A_; }

private:
    void rhs(const ComplexField& spec, double t, ComplexField& out) const;
    std::vector<double> dealias_;
    std::vector<std::vector<cplx>> D_;
    std::vector<double> xi2_;
    Grid g_;
    PotentialSource A_;
    ForcingSource F_;
    SolverConfig cfg_;
};

// Throws InvalidArgument on CFL violation (‖A‖_∞ sampled at the given times).
void check_cfl(const Grid& g, const PotentialSource& A, const SolverConfig& cfg, const std::vector<double>& times);

// Slices at the requested times (times[0] = 0 carries f exactly).
SpaceTimeField solve(const Grid& g, std::span<const cplx> f, const PotentialSource& A, const ForcingSource& F,
                     const std::vector<double>& times, const SolverConfig& cfg = {});
// u = U_A(t,0)f + ∫₀ᵗ U_A(t,s)F(s)ds, one Simpson panel per step.
SpaceTimeField duhamel_solve(const Grid& g, std::span<const cplx> f, const PotentialSource& A, const ForcingSource& F,
                             const std::vector<double>& times, const SolverConfig& cfg = {});

// Output times 0, out_dt, ..., T.
std::vector<double> uniform_times(double T, double out_dt);

class Propagator {
public:
    Propagator(const Grid& g, PotentialSource A, SolverConfig cfg = {});
    // U_A(t, s) f; t < s runs backwards.
    ComplexField apply(std::span<const cplx> f, double t, double s) const;

private:
    Integrator I_;
};

// max over probes of ‖U(t,s)U(s,0)f - U(t,0)f‖₂ / ‖f‖₂.
double propagator_compose_check(const Propagator& U, double s, double t, const std::vector<ComplexField>& probes);

// ∂_t u - iΔu + A·∇u - F on the given slices; the time derivative uses
// e^{itΔ}∂_t(e^{-itΔ}u) with 7-point finite differences. With dealias the
// product A·∇u is the one the integrator sees; without, the full product.
SpaceTimeField equation_residual(const SpaceTimeField& u, const PotentialSource& A, const ForcingSource& F,
                                 bool dealias = true);

struct EnergyBound {
    double sup_norm = 0;    // sup_t ‖u(t)‖₂
    double data_norm = 0;   // ‖f‖₂
    double forcing = 0;     // ‖F‖_{L¹L²}
    double grad = 0;        // ‖∇A‖_{L¹L^∞}
    double div = 0;         // ‖div A‖_{L¹L^∞}
    double tight_bound = 0; // (φ + sqrt(φ² + (1-δ)‖f‖²)) / (1-δ)
    double c4_bound = 0;    // 4(‖f‖ + φ)
    double effective_c = 0; // sup_norm / (‖f‖ + φ)
    bool premise = false;   // ‖∇A‖_{L¹L^∞} < 1/2
    bool pass = false;
};
EnergyBound energy_bound_check(const SpaceTimeField& u, const PotentialSource& A, const ForcingSource& F);

struct ReducedEquationResidual {
    int k = 0;
    double residual = 0;      // ‖∂_t u_k - iΔu_k + A_{<=k-4}·∇u_k + E^k - F_k‖_{L¹L²}
    // band piece of the residual with the full (not dealiased) product
    double band_residual = 0; // ‖P_k(∂_t u - iΔu + A·∇u - F)‖_{L¹L²}
    double identity_gap = 0;  // ‖difference of the two‖_{L¹L²}
    double scale = 0;         // ‖F_k‖_{L¹L²} + ‖A_{<=k-4}·∇u_k‖_{L¹L²} + ‖E^k‖_{L¹L²}
};
ReducedEquationResidual lp_reduced_equation_check(const SpaceTimeField& u, const PotentialSource& A,
                                                  const ForcingSource& F, int k);

}  // namespace magschro
