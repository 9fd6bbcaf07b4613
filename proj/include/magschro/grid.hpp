#pragma once

#include "magschro/common.hpp"

#include <array>
#include <cstdint>
#include <memory>

namespace magschro {

// Periodic box [-L/2, L/2)^n with N points per axis. Space index is row-major,
// axis 0 slowest. Spectra use FFT order: index i carries the signed mode
// i < N/2 ? i : i - N, i.e. frequency mode/L.
struct Grid {
    int dim = 1;
    int points = 8;
    double length = 1.0;
    double dt = 0.1;
    double final_time = 1.0;

    std::size_t size() const;
    double dx() const { return length / points; }
    double frequency_spacing() const { return 1.0 / length; }
    double cell_volume() const;
    double nyquist() const { return points / (2.0 * length); }
    std::size_t time_steps() const;
    double time(std::size_t i) const { return static_cast<double>(i) * dt; }

    int signed_mode(int i) const { return i < points / 2 ? i : i - points; }
    double coordinate(int i) const { return -0.5 * length + i * dx(); }
    double frequency(int i) const { return signed_mode(i) / length; }
    // Frequencies of one axis in physical (sorted) order.
    std::vector<double> physical_frequencies() const;
    int physical_index(int fft_index) const { return (fft_index + points / 2) % points; }

    std::array<int, 3> unravel(std::size_t idx) const;
    std::size_t ravel(const std::array<int, 3>& ijk) const;

    bool same_space(const Grid& other) const;
};

Grid make_grid(int n, int N, double L, double dt, double T);
// Same space lattice, new time lattice.
Grid with_time(const Grid& g, double dt, double T);

// Cached per-lattice tables: coordinates of every site, frequencies of every
// spectral index, |ξ|, and the (-1)^{Σi} parity used by the centred transform.
struct LatticeTables {
    std::vector<double> x;        // dim * size, site-major
    std::vector<double> xi;       // dim * size
    std::vector<double> xi_norm;  // size
    std::vector<double> parity;   // ±1
};
const LatticeTables& lattice_tables(const Grid& g);

struct SpaceTimeField {
    Grid grid;
    std::vector<double> times;
    std::vector<ComplexField> slices;

    std::size_t slice_count() const { return slices.size(); }
    static SpaceTimeField zeros(const Grid& g);
    static SpaceTimeField zeros(const Grid& g, const std::vector<double>& times);
};

SpaceTimeField scaled(const SpaceTimeField& u, cplx a);
SpaceTimeField sum(const SpaceTimeField& a, const SpaceTimeField& b);
SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b);

ComplexField to_complex(std::span<const double> v);
RealField real_part(std::span<const cplx> v);
double max_abs_imag(std::span<const cplx> v);

}  // namespace magschro
