#pragma once

#include "magschro/grid.hpp"

#include <array>

namespace magschro {

// Rotation of R^n (n <= 3), row-major 3x3 storage.
struct Rotation {
    int n = 2;
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int i, int j) const { return m[3 * i + j]; }
    double& operator()(int i, int j) { return m[3 * i + j]; }
    std::array<double, 3> apply(const std::array<double, 3>& v) const;
    Rotation compose(const Rotation& other) const;  // this * other
    Rotation transpose() const;
    double determinant() const;
    double orthogonality_error() const;  // max |U^T U - I|

    static Rotation identity(int n);
    static Rotation planar(double theta);                     // n = 2
    static Rotation plane(int n, int a, int b, double theta);  // rotation in plane (a, b)
    static Rotation zyz(double alpha, double beta, double gamma);
    static Rotation from_quaternion(double w, double x, double y, double z);
};

std::array<double, 3> zyz_angles(const Rotation& U);

// B(z) = f(Uz) on the lattice (rotation about the site x = 0), via three
// Fourier line shears per planar factor. Exact for band-limited fields whose
// support stays inside the box under shearing.
ComplexField rotate_field(const Grid& g, std::span<const cplx> f, const Rotation& U);
void rotate_fields(const Grid& g, std::vector<ComplexField>& fields, const Rotation& U);

// B(y) = f(y + a), spectral shift.
ComplexField translate_field(const Grid& g, std::span<const cplx> f, std::span<const double> a);

}  // namespace magschro
