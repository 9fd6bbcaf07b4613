#pragma once

#include "magschro/grid.hpp"

#include <functional>

namespace magschro {

// f̂(ξ) = Σ_x f(x) e^{-2πi x·ξ} dx^n, with x on the centred lattice.
ComplexField fourier_forward(const Grid& g, std::span<const cplx> field);
ComplexField fourier_inverse(const Grid& g, std::span<const cplx> spectrum);

// Unnormalized in-place FFT over the whole lattice; sign -1 forward, +1 inverse.
void fft_inplace(const Grid& g, ComplexField& data, int sign);

// Unnormalized 1-D FFT of a contiguous line.
void fft_1d(std::span<cplx> data, int sign);

// Applies a multiplier given in FFT order. Cheaper than forward/inverse since
// the centring phase cancels.
ComplexField apply_multiplier(const Grid& g, std::span<const cplx> field, std::span<const double> m);
ComplexField apply_multiplier(const Grid& g, std::span<const cplx> field, std::span<const cplx> m);
// In place on a spectrum produced by fft_inplace (divides by N^n on the way back).
void multiply_and_invert(const Grid& g, ComplexField& spec, std::span<const double> m);

std::vector<double> radial_multiplier(const Grid& g, const std::function<double(double)>& profile);
// 2πiξ_axis, zero at the Nyquist index so real fields stay real.
std::vector<cplx> derivative_multiplier(const Grid& g, int axis);
std::vector<double> laplacian_multiplier(const Grid& g);

ComplexField spectral_derivative(const Grid& g, std::span<const cplx> field, int axis);
ComplexField spectral_laplacian(const Grid& g, std::span<const cplx> field);
ComplexField spectral_gradient_dot(const Grid& g, const std::vector<RealField>& a, std::span<const cplx> u);

// e^{itΔ}: multiplier e^{-4π² i t |ξ|²}. Warns on mass near Nyquist.
ComplexField free_propagate(const Grid& g, std::span<const cplx> f, double t);
SpaceTimeField free_evolution(const Grid& g, std::span<const cplx> f, const std::vector<double>& times);

// Unit-L² packet exp(-π|x-c|²/w²) e^{2πi p·x}.
ComplexField gaussian_wavepacket(const Grid& g, std::span<const double> center, double width,
                                 std::span<const double> momentum);

// Fraction of L² mass at |ξ_axis| > (1 - margin)·Nyquist on any axis.
double nyquist_mass_fraction(const Grid& g, std::span<const cplx> field, double margin = 0.1);

double l2_norm(const Grid& g, std::span<const cplx> f);
double lp_norm(const Grid& g, std::span<const cplx> f, double p);
double lp_norm(const Grid& g, std::span<const double> f, double p);
double spectrum_l2_norm(const Grid& g, std::span<const cplx> spec);

}  // namespace magschro

namespace magschro {
// ‖ ‖g‖_{L^{p_inner}_{x₁}} ‖_{L^{p_outer}_{x₂..x_n}} for nonnegative samples g (axis 0 is x₁).
double axis_mixed_norm(const Grid& g, std::span<const double> absval, double p_inner, double p_outer);
// Inner norms only: one value per (x₂..x_n) site.
std::vector<double> inner_axis_norms(const Grid& g, std::span<const double> absval, double p_inner);
}  // namespace magschro
