#include "magschro/rotation.hpp"

#include "magschro/fourier.hpp"

#include <cmath>

namespace magschro {

std::array<double, 3> Rotation::apply(const std::array<double, 3>& v) const {
    std::array<double, 3> out{0, 0, 0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
}

Rotation Rotation::compose(const Rotation& o) const {
    Rotation r = identity(n);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
            r(i, j) = s;
        }
    return r;
}

Rotation Rotation::transpose() const {
    Rotation r = *this;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
}

double Rotation::determinant() const {
    const auto& a = m;
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6]);
}

double Rotation::orthogonality_error() const {
    auto p = transpose().compose(*this);
    double e = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
    return e;
}

Rotation Rotation::identity(int n) {
    Rotation r;
    r.n = n;
    return r;
}

Rotation Rotation::plane(int n, int a, int b, double theta) {
    Rotation r = identity(n);
    double c = std::cos(theta), s = std::sin(theta);
    r(a, a) = c;
    r(a, b) = -s;
    r(b, a) = s;
    r(b, b) = c;
    return r;
}

Rotation Rotation::planar(double theta) { return plane(2, 0, 1, theta); }

Rotation Rotation::zyz(double alpha, double beta, double gamma) {
    auto ry = plane(3, 0, 2, -beta);
    return plane(3, 0, 1, alpha).compose(ry).compose(plane(3, 0, 1, gamma));
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
    double s = std::sqrt(w * w + x * x + y * y + z * z);
    w /= s, x /= s, y /= s, z /= s;
    Rotation r = identity(3);
    r.m = {1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
           2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
           2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y)};
    return r;
}

std::array<double, 3> zyz_angles(const Rotation& U) {
    double cb = std::clamp(U(2, 2), -1.0, 1.0);
    double beta = std::acos(cb);
    double sb = std::sin(beta);
    if (sb > 1e-9) return {std::atan2(U(1, 2), U(0, 2)), beta, std::atan2(U(2, 1), -U(2, 0))};
    if (cb > 0) return {std::atan2(U(1, 0), U(0, 0)), 0.0, 0.0};
    return {std::atan2(-U(1, 0), -U(0, 0)), kPi, 0.0};
}

namespace {

// h(y) = g(y + s·y_b e_a): every line along axis a is shifted by s·y_b.
void shear(const Grid& g, ComplexField& f, int a, int b, double s) {
    if (s == 0.0) return;
    const int N = g.points;
    std::size_t stride[3] = {1, 1, 1};
    for (int d = g.dim - 2; d >= 0; --d) stride[d] = stride[d + 1] * N;
    std::vector<cplx> line(N), phase(N);
    const std::size_t lines = g.size() / N;
    for (std::size_t l = 0; l < lines; ++l) {
        // enumerate base index with coordinate a = 0
        std::size_t rem = l, base = 0;
        int coord_b = 0;
        for (int d = g.dim - 1; d >= 0; --d) {
            if (d == a) continue;
            int i = static_cast<int>(rem % N);
            rem /= N;
            base += i * stride[d];
            if (d == b) coord_b = i;
        }
        const double delta = s * g.coordinate(coord_b);
        for (int i = 0; i < N; ++i) line[i] = f[base + i * stride[a]];
        fft_1d(line, -1);
        for (int i = 0; i < N; ++i) {
            int m = g.signed_mode(i);
            double ang = kTwoPi * m * delta / g.length;
            line[i] *= (i == N / 2) ? cplx(std::cos(ang), 0.0) : std::polar(1.0, ang);
        }
        fft_1d(line, +1);
        for (int i = 0; i < N; ++i) f[base + i * stride[a]] = line[i] / static_cast<double>(N);
    }
}

// B(y) = f(R y) for R the 90° rotation (y_a, y_b) -> (-y_b, y_a) in plane (a, b).
void quarter_turn(const Grid& g, ComplexField& f, int a, int b) {
    ComplexField out(f.size());
    const int N = g.points;
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        auto ijk = g.unravel(idx);
        auto src = ijk;
        src[a] = (N - ijk[b]) % N;
        src[b] = ijk[a];
        out[idx] = f[g.ravel(src)];
    }
    f.swap(out);
}

void rotate_plane(const Grid& g, ComplexField& f, int a, int b, double theta) {
    double turns = std::round(theta / (0.5 * kPi));
    double phi = theta - turns * 0.5 * kPi;
    int q = ((static_cast<int>(turns) % 4) + 4) % 4;
    for (int i = 0; i < q; ++i) quarter_turn(g, f, a, b);
    if (phi == 0.0) return;
    double alpha = -std::tan(0.5 * phi), beta = std::sin(phi);
    shear(g, f, a, b, alpha);
    shear(g, f, b, a, beta);
    shear(g, f, a, b, alpha);
}

}  // namespace

void rotate_fields(const Grid& g, std::vector<ComplexField>& fields, const Rotation& U) {
    if (U.n != g.dim) throw InvalidArgument("rotation dimension does not match grid");
    if (g.dim == 1) return;
    if (g.dim == 2) {
        double theta = std::atan2(U(1, 0), U(0, 0));
        for (auto& f : fields) rotate_plane(g, f, 0, 1, theta);
        return;
    }
    auto [al, be, ga] = zyz_angles(U);
    for (auto& f : fields) {
        rotate_plane(g, f, 0, 1, al);
        rotate_plane(g, f, 0, 2, -be);
        rotate_plane(g, f, 0, 1, ga);
    }
}

ComplexField rotate_field(const Grid& g, std::span<const cplx> f, const Rotation& U) {
    std::vector<ComplexField> v{ComplexField(f.begin(), f.end())};
    rotate_fields(g, v, U);
    return std::move(v[0]);
}

ComplexField translate_field(const Grid& g, std::span<const cplx> f, std::span<const double> a) {
    const auto& t = lattice_tables(g);
    std::vector<cplx> m(g.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        double ph = 0;
        bool nyq = false;
        auto ijk = g.unravel(i);
        for (int d = 0; d < g.dim; ++d) {
            ph += t.xi[i * g.dim + d] * a[d];
            nyq = nyq || ijk[d] == g.points / 2;
        }
        m[i] = nyq ? cplx(std::cos(kTwoPi * ph), 0.0) : std::polar(1.0, kTwoPi * ph);
    }
    return apply_multiplier(g, f, std::span<const cplx>(m));
}

}  // namespace magschro
