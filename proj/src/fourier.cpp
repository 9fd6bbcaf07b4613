#include "magschro/fourier.hpp"

#include "magschro/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace magschro {

namespace {

std::mutex plan_mutex;

fftw_plan cached_plan(int rank, int n, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> plans;
    std::lock_guard lock(plan_mutex);
    auto key = std::make_tuple(rank, n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    int dims[3] = {n, n, n};
    std::size_t total = 1;
    for (int d = 0; d < rank; ++d) total *= n;
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(rank, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw NumericalFailure("FFTW plan creation failed");
    plans.emplace(key, p);
    return p;
}

void run_plan(fftw_plan p, cplx* data) {
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

void check_size(const Grid& g, std::size_t n) {
    if (n != g.size()) throw InvalidArgument("field size does not match grid");
}

}  // namespace

void fft_inplace(const Grid& g, ComplexField& data, int sign) {
    check_size(g, data.size());
    run_plan(cached_plan(g.dim, g.points, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD), data.data());
}

void fft_1d(std::span<cplx> data, int sign) {
    run_plan(cached_plan(1, static_cast<int>(data.size()), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD),
             data.data());
}

ComplexField fourier_forward(const Grid& g, std::span<const cplx> field) {
    check_size(g, field.size());
    ComplexField out(field.begin(), field.end());
    fft_inplace(g, out, -1);
    const auto& par = lattice_tables(g).parity;
    const double w = g.cell_volume();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= w * par[i];
    return out;
}

ComplexField fourier_inverse(const Grid& g, std::span<const cplx> spectrum) {
    check_size(g, spectrum.size());
    const auto& par = lattice_tables(g).parity;
    ComplexField out(spectrum.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spectrum[i] * par[i];
    fft_inplace(g, out, +1);
    const double w = 1.0 / std::pow(g.length, g.dim);
    for (auto& v : out) v *= w;
    return out;
}

void multiply_and_invert(const Grid& g, ComplexField& spec, std::span<const double> m) {
    const double inv = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m[i] * inv;
    fft_inplace(g, spec, +1);
}

ComplexField apply_multiplier(const Grid& g, std::span<const cplx> field, std::span<const double> m) {
    check_size(g, field.size());
    ComplexField out(field.begin(), field.end());
    fft_inplace(g, out, -1);
    multiply_and_invert(g, out, m);
    return out;
}

ComplexField apply_multiplier(const Grid& g, std::span<const cplx> field, std::span<const cplx> m) {
    check_size(g, field.size());
    ComplexField out(field.begin(), field.end());
    fft_inplace(g, out, -1);
    const double inv = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= m[i] * inv;
    fft_inplace(g, out, +1);
    return out;
}

std::vector<double> radial_multiplier(const Grid& g, const std::function<double(double)>& profile) {
    const auto& r = lattice_tables(g).xi_norm;
    std::vector<double> m(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) m[i] = profile(r[i]);
    return m;
}

std::vector<cplx> derivative_multiplier(const Grid& g, int axis) {
    const auto& t = lattice_tables(g);
    std::vector<cplx> m(g.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto ijk = g.unravel(i);
        if (ijk[axis] == g.points / 2) continue;
        m[i] = cplx(0.0, kTwoPi * t.xi[i * g.dim + axis]);
    }
    return m;
}

std::vector<double> laplacian_multiplier(const Grid& g) {
    const auto& r = lattice_tables(g).xi_norm;
    std::vector<double> m(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) m[i] = -4.0 * kPi * kPi * r[i] * r[i];
    return m;
}

ComplexField spectral_derivative(const Grid& g, std::span<const cplx> field, int axis) {
    if (axis < 0 || axis >= g.dim) throw InvalidArgument("derivative axis out of range");
    auto m = derivative_multiplier(g, axis);
    return apply_multiplier(g, field, std::span<const cplx>(m));
}

ComplexField spectral_laplacian(const Grid& g, std::span<const cplx> field) {
    auto m = laplacian_multiplier(g);
    return apply_multiplier(g, field, std::span<const double>(m));
}

ComplexField spectral_gradient_dot(const Grid& g, const std::vector<RealField>& a, std::span<const cplx> u) {
    if (static_cast<int>(a.size()) != g.dim) throw InvalidArgument("vector field has wrong component count");
    ComplexField out(g.size(), cplx{});
    ComplexField spec(u.begin(), u.end());
    fft_inplace(g, spec, -1);
    const double inv = 1.0 / static_cast<double>(g.size());
    for (int d = 0; d < g.dim; ++d) {
        auto m = derivative_multiplier(g, d);
        ComplexField du(spec.size());
        for (std::size_t i = 0; i < du.size(); ++i) du[i] = spec[i] * m[i] * inv;
        fft_inplace(g, du, +1);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[d][i] * du[i];
    }
    return out;
}

double nyquist_mass_fraction(const Grid& g, std::span<const cplx> field, double margin) {
    ComplexField spec(field.begin(), field.end());
    fft_inplace(g, spec, -1);
    const auto& t = lattice_tables(g);
    const double cut = (1.0 - margin) * g.nyquist();
    double total = 0, edge = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double p = std::norm(spec[i]);
        total += p;
        for (int d = 0; d < g.dim; ++d)
            if (std::abs(t.xi[i * g.dim + d]) >= cut) {
                edge += p;
                break;
            }
    }
    return total > 0 ? edge / total : 0.0;
}

ComplexField free_propagate(const Grid& g, std::span<const cplx> f, double t) {
    if (t == 0.0) return ComplexField(f.begin(), f.end());
    double leak = nyquist_mass_fraction(g, f);
    if (leak > 1e-6) {
        std::ostringstream os;
        os << "spectral mass fraction " << leak << " within 10% of Nyquist";
        warn("nyquist-leakage", os.str());
    }
    const auto& r = lattice_tables(g).xi_norm;
    std::vector<cplx> m(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) m[i] = std::polar(1.0, -4.0 * kPi * kPi * t * r[i] * r[i]);
    return apply_multiplier(g, f, std::span<const cplx>(m));
}

SpaceTimeField free_evolution(const Grid& g, std::span<const cplx> f, const std::vector<double>& times) {
    SpaceTimeField u{g, times, {}};
    u.slices.reserve(times.size());
    ComplexField spec(f.begin(), f.end());
    fft_inplace(g, spec, -1);
    const auto& r = lattice_tables(g).xi_norm;
    const double inv = 1.0 / static_cast<double>(g.size());
    for (double t : times) {
        ComplexField s(spec.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = spec[i] * std::polar(inv, -4.0 * kPi * kPi * t * r[i] * r[i]);
        fft_inplace(g, s, +1);
        u.slices.push_back(std::move(s));
    }
    return u;
}

ComplexField gaussian_wavepacket(const Grid& g, std::span<const double> center, double width,
                                 std::span<const double> momentum) {
    if (static_cast<int>(center.size()) != g.dim || static_cast<int>(momentum.size()) != g.dim)
        throw InvalidArgument("wave packet centre/momentum dimension mismatch");
    if (width < 4.0 * g.dx()) throw InvalidArgument("wave packet width under-resolved (needs >= 4 dx)");
    for (double p : momentum)
        if (std::abs(p) > 0.5 * g.nyquist()) throw InvalidArgument("wave packet momentum beyond half Nyquist");
    const auto& t = lattice_tables(g);
    ComplexField f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double r2 = 0, ph = 0;
        for (int d = 0; d < g.dim; ++d) {
            double x = t.x[i * g.dim + d];
            // nearest periodic image of the centre
            double dxv = x - center[d];
            dxv -= g.length * std::round(dxv / g.length);
            r2 += dxv * dxv;
            ph += momentum[d] * x;
        }
        f[i] = std::polar(std::exp(-kPi * r2 / (width * width)), kTwoPi * ph);
    }
    double nrm = l2_norm(g, f);
    for (auto& v : f) v /= nrm;
    return f;
}

double l2_norm(const Grid& g, std::span<const cplx> f) {
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::norm(f[i]);
    return std::sqrt(pairwise_sum(a) * g.cell_volume());
}

double lp_norm(const Grid& g, std::span<const cplx> f, double p) {
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
    return lp_norm(g, std::span<const double>(a), p);
}

double lp_norm(const Grid& g, std::span<const double> f, double p) {
    if (std::isinf(p)) {
        double m = 0;
        for (double v : f) m = std::max(m, std::abs(v));
        return m;
    }
    std::vector<double> a(f.size());
    double scale = 0;
    for (double v : f) scale = std::max(scale, std::abs(v));
    if (scale == 0) return 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::pow(std::abs(f[i]) / scale, p);
    return scale * std::pow(pairwise_sum(a) * g.cell_volume(), 1.0 / p);
}

double spectrum_l2_norm(const Grid& g, std::span<const cplx> spec) {
    std::vector<double> a(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) a[i] = std::norm(spec[i]);
    return std::sqrt(pairwise_sum(a) / std::pow(g.length, g.dim));
}

}  // namespace magschro

namespace magschro {

std::vector<double> inner_axis_norms(const Grid& g, std::span<const double> absval, double p) {
    const std::size_t N = g.points;
    const std::size_t rest = g.size() / N;
    std::vector<double> out(rest);
    std::vector<double> line(N);
    const double dx = g.dx();
    for (std::size_t j = 0; j < rest; ++j) {
        double m = 0;
        for (std::size_t i = 0; i < N; ++i) {
            line[i] = std::abs(absval[i * rest + j]);
            m = std::max(m, line[i]);
        }
        if (std::isinf(p) || m == 0) {
            out[j] = m;
            continue;
        }
        for (auto& v : line) v = std::pow(v / m, p);
        out[j] = m * std::pow(pairwise_sum(line) * dx, 1.0 / p);
    }
    return out;
}

double axis_mixed_norm(const Grid& g, std::span<const double> absval, double p_inner, double p_outer) {
    auto inner = inner_axis_norms(g, absval, p_inner);
    if (g.dim == 1) return inner[0];
    Grid sub{g.dim - 1, g.points, g.length, g.dt, g.final_time};
    return lp_norm(sub, std::span<const double>(inner), p_outer);
}

}  // namespace magschro
