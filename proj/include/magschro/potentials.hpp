#pragma once

#include "magschro/mixed_norms.hpp"

#include <optional>
#include <string>

namespace magschro {

// DoG bump D = G_w - 2^{-n} G_{2w} with G_w = exp(-π|y|²/w²) has zero mean,
// which every preset inherits.
enum class PresetKind { bump, traveling_bump, curl, low_band };

std::string preset_name(PresetKind k);
PresetKind parse_preset(const std::string& name);

struct PresetParams {
    PresetKind kind = PresetKind::bump;
    double eps = 0.05;
    double width = 3.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> direction{1.0, 0.0, 0.0};  // normalized over the first n entries
    std::array<double, 3> velocity{0.0, 0.0, 0.0};   // traveling_bump and low_band drift
    // τ(t) = 1 + time_modulation·sin(2π·time_frequency·t) for bump and curl
    double time_frequency = 1.0;
    double time_modulation = 0.3;
    int cap = -2;  // low_band spectrum lies where χ(2^{-cap}|ξ|) = 1
};

// Parameters of λA(λ²t, λx).
PresetParams rescale_preset(const PresetParams& p, double lambda);
bool preset_time_independent(const PresetParams& p);
// Throws InvalidArgument when widths are under 3 dx or the envelope wraps the
// box above 1e-5 relative.
void check_preset_resolvable(const Grid& g, const PresetParams& p);
std::vector<RealField> sample_preset(const Grid& g, const PresetParams& p, double t);

struct VectorPotential {
    Grid grid;
    std::vector<double> times;
    std::vector<std::vector<RealField>> values;  // [slice][component]
    bool divergence_free = false;
    std::optional<PresetParams> preset;

    int dim() const { return grid.dim; }
    std::size_t slice_count() const { return values.size(); }
    bool time_independent() const;
};

// Slices at the grid times 0, dt, ..., T unless times are given.
VectorPotential make_potential(const Grid& g, const PresetParams& p);
VectorPotential make_potential(const Grid& g, const PresetParams& p, const std::vector<double>& times);
VectorPotential sampled_potential(const Grid& g, const std::vector<double>& times,
                                  std::vector<std::vector<RealField>> values);
VectorPotential zero_potential(const Grid& g, const std::vector<double>& times);
VectorPotential scaled(const VectorPotential& A, double a);

RealField divergence(const Grid& g, const std::vector<RealField>& a);
double max_divergence(const VectorPotential& A);
double max_abs(const VectorPotential& A);

// λA(λ²t, λx) with λ a power of two. The samples are kept and the lattice
// shrinks to (L/λ, dt/λ²), so the map is exact and composes exactly.
Grid rescaled_grid(const Grid& g, double lambda);
VectorPotential rescale_potential(const VectorPotential& A, double lambda);
// Same box, preset resampled with rescaled parameters. Differs from the exact
// map by the box truncation of low bands.
VectorPotential rescale_potential_same_box(const VectorPotential& A, double lambda);
// Same lattice, periodic subsampling x -> λx (λ >= 1).
VectorPotential rescale_potential_periodic(const VectorPotential& A, double lambda);
// λ^weight·u(λ²t, λx) on the lattice, λ = 2^m >= 1.
SpaceTimeField rescale_field(const SpaceTimeField& u, double lambda, double weight);

// ∂_t A by 4th-order differences (one-sided at the ends). error_estimate is
// max|D6 - D4| / max|D4| over interior slices (D2 if under 7 slices).
struct TimeDerivative {
    std::vector<std::vector<RealField>> values;
    double error_estimate = 0;
};
TimeDerivative time_derivative(const VectorPotential& A);

struct YNormParams {
    double h = 0.125;
    std::optional<double> p0;  // default (n-1)/2 - 1/4
    RotationSampler sampler;   // default: 16 angles (n = 2), 24 rotations (n = 3)
    PathSpec path;
    std::optional<BandRange> range;  // default lattice_band_range
};
YNormParams default_ynorm_params(int n);

struct YNormRow {
    std::string component;
    int k = 0;
    bool banded = false;
    double value = 0;
};

struct YNormValue {
    double value = 0;
    std::vector<YNormRow> rows;
    double component(const std::string& name) const;  // sum of the rows with that name
};

struct YNormReport {
    YNormValue y0, y1, y1_tilde, y2, y3, cor90;
};

enum YNormMask : unsigned {
    kY0 = 1,
    kY1 = 2,
    kY1Tilde = 4,
    kY2 = 8,
    kY3 = 16,
    kCor90 = 32,
    kAllY = 63,
};

YNormReport y_norms(const VectorPotential& A, const YNormParams& p, unsigned mask = kAllY);
YNormValue y0_norm(const VectorPotential& A, const YNormParams& p);
YNormValue y1_norm(const VectorPotential& A);
YNormValue y1_tilde_norm(const VectorPotential& A, double p0, const YNormParams& p);
YNormValue y2_norm(const VectorPotential& A, const YNormParams& p);
YNormValue y3_norm(const VectorPotential& A, const YNormParams& p);
YNormValue corollary90_norm(const VectorPotential& A);

}  // namespace magschro
