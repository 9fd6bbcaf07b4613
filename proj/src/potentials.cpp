#include "magschro/potentials.hpp"

#include "magschro/diagnostics.hpp"
#include "magschro/fourier.hpp"

#include <climits>
#include <cmath>
#include <map>
#include <sstream>

namespace magschro {

namespace {

double wrap(double y, double L) {
    y = std::fmod(y + 0.5 * L, L);
    if (y < 0) y += L;
    return y - 0.5 * L;
}

std::array<double, 3> unit_direction(const PresetParams& p, int n) {
    std::array<double, 3> e{0, 0, 0};
    double s = 0;
    for (int i = 0; i < n; ++i) s += p.direction[i] * p.direction[i];
    if (s == 0) throw InvalidArgument("preset direction is zero");
    for (int i = 0; i < n; ++i) e[i] = p.direction[i] / std::sqrt(s);
    return e;
}

double tau(const PresetParams& p, double t) { return 1.0 + p.time_modulation * std::sin(kTwoPi * p.time_frequency * t); }

// G_w(x - c) on the lattice, nearest image.
RealField gaussian(const Grid& g, double w, const std::array<double, 3>& c) {
    const auto& T = lattice_tables(g);
    RealField out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double r2 = 0;
        for (int a = 0; a < g.dim; ++a) {
            double y = wrap(T.x[i * g.dim + a] - c[a], g.length);
            r2 += y * y;
        }
        out[i] = std::exp(-kPi * r2 / (w * w));
    }
    return out;
}

RealField dog(const Grid& g, double w, const std::array<double, 3>& c) {
    RealField a = gaussian(g, w, c), b = gaussian(g, 2 * w, c);
    double s = std::ldexp(1.0, -g.dim);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= s * b[i];
    return a;
}

RealField real_of(const ComplexField& f) { return real_part(f); }

bool is_power_of_two_ratio(double lambda) {
    if (!(lambda > 0)) return false;
    int e;
    double m = std::frexp(lambda, &e);
    return m == 0.5;
}

double sup_abs(std::span<const double> v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::string preset_name(PresetKind k) {
    switch (k) {
        case PresetKind::bump: return "bump";
        case PresetKind::traveling_bump: return "traveling_bump";
        case PresetKind::curl: return "curl";
        case PresetKind::low_band: return "low_band";
    }
    return "?";
}

PresetKind parse_preset(const std::string& s) {
    for (auto k : {PresetKind::bump, PresetKind::traveling_bump, PresetKind::curl, PresetKind::low_band})
        if (preset_name(k) == s) return k;
    throw InvalidArgument("unknown potential preset '" + s + "'");
}

PresetParams rescale_preset(const PresetParams& p, double lambda) {
    if (!is_power_of_two_ratio(lambda)) throw InvalidArgument("rescale factor must be a power of two");
    PresetParams q = p;
    q.eps = p.eps * lambda;
    q.width = p.width / lambda;
    for (int i = 0; i < 3; ++i) {
        q.center[i] = p.center[i] / lambda;
        q.velocity[i] = p.velocity[i] * lambda;
    }
    q.time_frequency = p.time_frequency * lambda * lambda;
    q.cap = p.cap + static_cast<int>(std::lround(std::log2(lambda)));
    return q;
}

bool preset_time_independent(const PresetParams& p) {
    switch (p.kind) {
        case PresetKind::bump:
        case PresetKind::curl: return p.time_modulation == 0 || p.time_frequency == 0;
        case PresetKind::traveling_bump:
        case PresetKind::low_band: return p.velocity[0] == 0 && p.velocity[1] == 0 && p.velocity[2] == 0;
    }
    return false;
}

void check_preset_resolvable(const Grid& g, const PresetParams& p) {
    if (!(p.eps >= 0)) throw InvalidArgument("preset amplitude must be nonnegative");
    if (p.kind == PresetKind::curl && g.dim < 2) throw InvalidArgument("curl preset needs n >= 2");
    if (!(p.width >= 3 * g.dx())) {
        std::ostringstream os;
        os << "preset width " << p.width << " is under 3 grid spacings (dx = " << g.dx() << ")";
        throw InvalidArgument(os.str());
    }
    // widest Gaussian in the envelope
    double w = p.kind == PresetKind::curl ? p.width : 2 * p.width;
    double reach = 0;
    for (double t : {0.0, g.final_time}) {
        bool moving = p.kind == PresetKind::traveling_bump || p.kind == PresetKind::low_band;
        for (int a = 0; a < g.dim; ++a)
            reach = std::max(reach, std::abs(p.center[a] + (moving ? p.velocity[a] * t : 0.0)));
    }
    double room = 0.5 * g.length - reach;
    // exp(-π room²/w²) <= 1e-5
    if (room < w * std::sqrt(std::log(1e5) / kPi)) {
        std::ostringstream os;
        os << "preset envelope of width " << w << " does not fit the box of length " << g.length;
        throw InvalidArgument(os.str());
    }
    if (p.kind == PresetKind::low_band && std::ldexp(1.75, p.cap - 1) > g.nyquist())
        throw InvalidArgument("low_band cap exceeds the lattice Nyquist frequency");
}

std::vector<RealField> sample_preset(const Grid& g, const PresetParams& p, double t) {
    const int n = g.dim;
    std::vector<RealField> A(n, RealField(g.size(), 0.0));
    if (p.eps == 0) return A;
    auto e = unit_direction(p, n);
    switch (p.kind) {
        case PresetKind::bump: {
            auto D = dog(g, p.width, p.center);
            double s = p.eps * tau(p, t);
            for (int c = 0; c < n; ++c)
                for (std::size_t i = 0; i < D.size(); ++i) A[c][i] = s * e[c] * D[i];
            break;
        }
        case PresetKind::traveling_bump: {
            std::array<double, 3> c0{};
            for (int a = 0; a < 3; ++a) c0[a] = p.center[a] + p.velocity[a] * t;
            auto D = dog(g, p.width, c0);
            for (int c = 0; c < n; ++c)
                for (std::size_t i = 0; i < D.size(); ++i) A[c][i] = p.eps * e[c] * D[i];
            break;
        }
        case PresetKind::curl: {
            auto psi = gaussian(g, p.width, p.center);
            for (auto& v : psi) v *= p.width;
            auto z = to_complex(psi);
            std::vector<RealField> d(n);
            for (int a = 0; a < n; ++a) d[a] = real_of(spectral_derivative(g, z, a));
            double s = p.eps * tau(p, t);
            if (n == 2) {
                for (std::size_t i = 0; i < psi.size(); ++i) {
                    A[0][i] = -s * d[1][i];
                    A[1][i] = s * d[0][i];
                }
            } else {
                // ∇ψ × e
                for (std::size_t i = 0; i < psi.size(); ++i) {
                    A[0][i] = s * (d[1][i] * e[2] - d[2][i] * e[1]);
                    A[1][i] = s * (d[2][i] * e[0] - d[0][i] * e[2]);
                    A[2][i] = s * (d[0][i] * e[1] - d[1][i] * e[0]);
                }
            }
            break;
        }
        case PresetKind::low_band: {
            auto D = dog(g, p.width, p.center);
            ComplexField spec = to_complex(D);
            fft_inplace(g, spec, -1);
            const auto& T = lattice_tables(g);
            const auto& cut = default_cutoffs();
            double scale = std::ldexp(1.0, 1 - p.cap);
            for (std::size_t i = 0; i < spec.size(); ++i) {
                double ph = 0;
                for (int a = 0; a < n; ++a) ph += T.xi[i * n + a] * p.velocity[a] * t;
                double m = i == 0 ? 0.0 : cut.chi(scale * T.xi_norm[i]);
                // keep the Nyquist planes out so the field stays real
                for (int a = 0; a < n; ++a) {
                    int idx = g.unravel(i)[a];
                    if (idx == g.points / 2) m = 0;
                }
                spec[i] *= m * std::polar(1.0, -kTwoPi * ph) / static_cast<double>(g.size());
            }
            fft_inplace(g, spec, +1);
            for (int c = 0; c < n; ++c)
                for (std::size_t i = 0; i < spec.size(); ++i) A[c][i] = p.eps * e[c] * spec[i].real();
            break;
        }
    }
    return A;
}

bool VectorPotential::time_independent() const {
    if (preset) return preset_time_independent(*preset);
    for (std::size_t t = 1; t < values.size(); ++t)
        if (values[t] != values[0]) return false;
    return true;
}

VectorPotential make_potential(const Grid& g, const PresetParams& p) {
    std::vector<double> times(g.time_steps() + 1);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = g.time(i);
    return make_potential(g, p, times);
}

VectorPotential make_potential(const Grid& g, const PresetParams& p, const std::vector<double>& times) {
    check_preset_resolvable(g, p);
    VectorPotential A;
    A.grid = g;
    A.times = times;
    A.preset = p;
    A.divergence_free = p.kind == PresetKind::curl;
    bool still = preset_time_independent(p);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (still && i > 0)
            A.values.push_back(A.values.front());
        else
            A.values.push_back(sample_preset(g, p, times[i]));
    }
    return A;
}

VectorPotential sampled_potential(const Grid& g, const std::vector<double>& times,
                                  std::vector<std::vector<RealField>> values) {
    if (values.size() != times.size()) throw InvalidArgument("potential slices and times differ in count");
    for (const auto& s : values) {
        if (static_cast<int>(s.size()) != g.dim) throw InvalidArgument("potential needs n components");
        for (const auto& c : s)
            if (c.size() != g.size()) throw InvalidArgument("potential component size mismatch");
    }
    VectorPotential A;
    A.grid = g;
    A.times = times;
    A.values = std::move(values);
    return A;
}

VectorPotential zero_potential(const Grid& g, const std::vector<double>& times) {
    std::vector<std::vector<RealField>> v(times.size(), std::vector<RealField>(g.dim, RealField(g.size(), 0.0)));
    auto A = sampled_potential(g, times, std::move(v));
    A.divergence_free = true;
    return A;
}

VectorPotential scaled(const VectorPotential& A, double a) {
    VectorPotential B = A;
    for (auto& s : B.values)
        for (auto& c : s)
            for (auto& v : c) v *= a;
    if (B.preset) B.preset->eps *= std::abs(a);
    if (a < 0) B.preset.reset();
    return B;
}

RealField divergence(const Grid& g, const std::vector<RealField>& a) {
    RealField out(g.size(), 0.0);
    for (int c = 0; c < g.dim; ++c) {
        auto d = spectral_derivative(g, to_complex(a[c]), c);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i].real();
    }
    return out;
}

double max_divergence(const VectorPotential& A) {
    double m = 0;
    for (const auto& s : A.values) m = std::max(m, sup_abs(divergence(A.grid, s)));
    return m;
}

double max_abs(const VectorPotential& A) {
    double m = 0;
    for (const auto& s : A.values)
        for (std::size_t i = 0; i < A.grid.size(); ++i) {
            double r = 0;
            for (const auto& c : s) r += c[i] * c[i];
            m = std::max(m, std::sqrt(r));
        }
    return m;
}

namespace {

// site index of λ x_j on the periodic lattice
std::vector<std::size_t> dilation_map(const Grid& g, int lam) {
    std::vector<std::size_t> map(g.size());
    const int N = g.points;
    for (std::size_t i = 0; i < map.size(); ++i) {
        auto ijk = g.unravel(i);
        std::array<int, 3> out{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) {
            long long j = static_cast<long long>(lam) * ijk[a] - static_cast<long long>(lam - 1) * (N / 2);
            out[a] = static_cast<int>(((j % N) + N) % N);
        }
        map[i] = g.ravel(out);
    }
    return map;
}

int lattice_factor(double lambda) {
    if (!is_power_of_two_ratio(lambda) || lambda < 1)
        throw InvalidArgument("lattice rescaling needs λ = 2^m with m >= 0");
    return static_cast<int>(lambda);
}

}  // namespace

Grid rescaled_grid(const Grid& g, double lambda) {
    if (!is_power_of_two_ratio(lambda)) throw InvalidArgument("rescale factor must be a power of two");
    Grid h = g;
    h.length = g.length / lambda;
    h.dt = g.dt / (lambda * lambda);
    h.final_time = g.final_time / (lambda * lambda);
    if (!(h.length > 1e-8 && h.length < 1e8 && h.dt > 1e-14))
        throw InvalidArgument("rescaled lattice leaves the supported box range");
    return h;
}

VectorPotential rescale_potential(const VectorPotential& A, double lambda) {
    VectorPotential B = A;
    B.grid = rescaled_grid(A.grid, lambda);
    for (std::size_t i = 0; i < B.times.size(); ++i) B.times[i] = A.times[i] / (lambda * lambda);
    for (auto& s : B.values)
        for (auto& c : s)
            for (auto& v : c) v *= lambda;
    if (B.preset) B.preset = rescale_preset(*A.preset, lambda);
    return B;
}

VectorPotential rescale_potential_same_box(const VectorPotential& A, double lambda) {
    if (!A.preset) throw InvalidArgument("same-box rescaling needs a preset potential");
    std::vector<double> times(A.times.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = A.times[i] / (lambda * lambda);
    Grid g = A.grid;
    g.final_time = A.grid.final_time / (lambda * lambda);
    g.dt = A.grid.dt / (lambda * lambda);
    return make_potential(g, rescale_preset(*A.preset, lambda), times);
}

VectorPotential rescale_potential_periodic(const VectorPotential& A, double lambda) {
    int lam = lattice_factor(lambda);
    auto map = dilation_map(A.grid, lam);
    VectorPotential B = A;
    B.preset.reset();
    for (std::size_t i = 0; i < B.times.size(); ++i) B.times[i] = A.times[i] / (lambda * lambda);
    B.grid.final_time = A.grid.final_time / (lambda * lambda);
    B.grid.dt = A.grid.dt / (lambda * lambda);
    for (std::size_t t = 0; t < A.values.size(); ++t)
        for (int c = 0; c < A.dim(); ++c)
            for (std::size_t i = 0; i < map.size(); ++i) B.values[t][c][i] = lambda * A.values[t][c][map[i]];
    return B;
}

SpaceTimeField rescale_field(const SpaceTimeField& u, double lambda, double weight) {
    int lam = lattice_factor(lambda);
    auto map = dilation_map(u.grid, lam);
    SpaceTimeField v = u;
    v.grid.final_time = u.grid.final_time / (lambda * lambda);
    v.grid.dt = u.grid.dt / (lambda * lambda);
    double w = std::pow(lambda, weight);
    for (std::size_t t = 0; t < u.slice_count(); ++t) {
        v.times[t] = u.times[t] / (lambda * lambda);
        for (std::size_t i = 0; i < map.size(); ++i) v.slices[t][i] = w * u.slices[t][map[i]];
    }
    return v;
}

TimeDerivative time_derivative(const VectorPotential& A) {
    const std::size_t S = A.slice_count();
    const int n = A.dim();
    const std::size_t M = A.grid.size();
    TimeDerivative out;
    out.values.assign(S, std::vector<RealField>(n, RealField(M, 0.0)));
    if (S < 2 || A.time_independent()) return out;
    double h = A.times[1] - A.times[0];
    for (std::size_t i = 1; i < S; ++i)
        if (std::abs(A.times[i] - A.times[i - 1] - h) > 1e-9 * std::abs(h))
            throw InvalidArgument("time derivative needs uniform slices");
    auto at = [&](std::size_t t, int c, std::size_t i) { return A.values[t][c][i]; };
    double diff = 0, scale = 0;
    for (int c = 0; c < n; ++c)
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t t = 0; t < S; ++t) {
                double d2, d4;
                if (S < 5) {
                    if (t == 0)
                        d2 = (at(1, c, i) - at(0, c, i)) / h;
                    else if (t == S - 1)
                        d2 = (at(t, c, i) - at(t - 1, c, i)) / h;
                    else
                        d2 = (at(t + 1, c, i) - at(t - 1, c, i)) / (2 * h);
                    d4 = d2;
                } else if (t >= 2 && t + 2 < S) {
                    d2 = (at(t + 1, c, i) - at(t - 1, c, i)) / (2 * h);
                    d4 = (-at(t + 2, c, i) + 8 * at(t + 1, c, i) - 8 * at(t - 1, c, i) + at(t - 2, c, i)) / (12 * h);
                } else {
                    // one-sided five-point stencils
                    bool fwd = t < 2;
                    double s = fwd ? 1.0 : -1.0;
                    auto f = [&](int j) { return at(fwd ? t + j : t - j, c, i); };
                    std::size_t off = fwd ? t : S - 1 - t;
                    if (off == 0) {
                        d4 = s * (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4)) / (12 * h);
                        d2 = s * (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
                    } else {
                        // one site in from the end: stencil t-1..t+3
                        auto g = [&](int j) { return at(fwd ? t + j : t - j, c, i); };
                        d4 = s * (-3 * g(-1) - 10 * g(0) + 18 * g(1) - 6 * g(2) + g(3)) / (12 * h);
                        d2 = s * (g(1) - g(-1)) / (2 * h);
                    }
                }
                out.values[t][c][i] = d4;
                if (S >= 7) {
                    if (t >= 3 && t + 3 < S) {
                        double d6 = (at(t + 3, c, i) - 9 * at(t + 2, c, i) + 45 * at(t + 1, c, i) - 45 * at(t - 1, c, i) +
                                     9 * at(t - 2, c, i) - at(t - 3, c, i)) /
                                    (60 * h);
                        diff = std::max(diff, std::abs(d6 - d4));
                    }
                } else {
                    diff = std::max(diff, std::abs(d2 - d4));
                }
                scale = std::max(scale, std::abs(d4));
            }
    out.error_estimate = scale > 0 ? diff / scale : 0.0;
    if (out.error_estimate > 0.05) {
        std::ostringstream os;
        os << "estimated finite-difference error in ∂_t A is " << out.error_estimate << " (dt too coarse)";
        warn("coarse-time-derivative", os.str());
    }
    return out;
}

YNormParams default_ynorm_params(int n) {
    YNormParams p;
    p.sampler = make_rotation_sampler(n, n == 2 ? 16 : 24);
    return p;
}

double YNormValue::component(const std::string& name) const {
    double s = 0;
    for (const auto& r : rows)
        if (r.component == name) s += r.value;
    return s;
}

namespace {

struct WeightedSum {
    YNormValue* out;
    std::string name;
    double total = 0;
    void add(int k, double v) {
        out->rows.push_back({name, k, true, v});
        total += v;
    }
};

// Per-translation, per-slice anisotropic values for one band and rotation.
struct Profile {
    std::vector<std::vector<double>> a2, d2, ap;  // [translation][slice]
};

double fold_const(const std::vector<std::vector<double>>& v, std::span<const double> times, double q) {
    double m = 0;
    for (const auto& s : v) m = std::max(m, time_norm(s, times, q));
    return m;
}

double fold_path(const std::vector<std::vector<double>>& v, std::span<const double> times, double q) {
    std::vector<double> best(times.size(), 0.0);
    for (const auto& s : v)
        for (std::size_t t = 0; t < best.size(); ++t) best[t] = std::max(best[t], s[t]);
    return time_norm(best, times, q);
}

}  // namespace

YNormReport y_norms(const VectorPotential& A, const YNormParams& P, unsigned mask) {
    const Grid& g = A.grid;
    const int n = g.dim;
    const std::size_t S = A.slice_count();
    const std::size_t M = g.size();
    YNormReport rep;
    if (S == 0) return rep;
    bool rotated = mask & (kY1Tilde | kY2 | kY3);
    if (rotated && n < 2) throw InvalidArgument("rotated Y-norms need n >= 2");
    const double p0 = P.p0 ? *P.p0 : (n - 1) / 2.0 - 0.25;
    if (mask & kY1Tilde) {
        if (!(p0 > 0) || p0 >= (n - 1) / 2.0) throw InvalidArgument("p0 must lie in (0, (n-1)/2)");
        if (n < 4) warn("y1-tilde-out-of-theorem", "Ỹ₁ evaluated for n < 4 as a diagnostic");
    }
    if (!(P.h > 0 && P.h < 0.25)) throw InvalidArgument("h must lie in (0, 1/4)");
    BandRange range = P.range ? *P.range : lattice_band_range(g);
    RotationSampler sampler = P.sampler;
    if (sampler.samples.empty() || sampler.n != n) sampler = default_ynorm_params(n).sampler;
    std::vector<std::array<double, 3>> shifts = P.path.translations;
    if (P.path.mode == PathMode::fixed_origin || shifts.empty()) shifts = {{0.0, 0.0, 0.0}};
    std::span<const double> times(A.times);

    bool need_dt = mask & (kY2 | kY3 | kCor90);
    bool need_hess = mask & (kY2 | kY3);
    TimeDerivative dtA;
    if (need_dt) dtA = time_derivative(A);

    // spectra of every slice and component
    std::vector<std::vector<ComplexField>> specA(S), specT(S);
    double total_mass = 0;
    for (std::size_t t = 0; t < S; ++t)
        for (int c = 0; c < n; ++c) {
            auto z = to_complex(A.values[t][c]);
            fft_inplace(g, z, -1);
            for (auto v : z) total_mass += std::norm(v);
            specA[t].push_back(std::move(z));
            if (need_dt) {
                auto w = to_complex(dtA.values[t][c]);
                fft_inplace(g, w, -1);
                specT[t].push_back(std::move(w));
            }
        }

    // mass outside the summed bands
    {
        std::vector<double> covered(M, 0.0);
        for (int k = range.k_min; k <= range.k_max; ++k) {
            auto m = band_multiplier(g, k);
            for (std::size_t i = 0; i < M; ++i) covered[i] += m[i];
        }
        double out = 0;
        for (std::size_t t = 0; t < S; ++t)
            for (int c = 0; c < n; ++c)
                for (std::size_t i = 0; i < M; ++i) out += std::norm((1 - covered[i]) * specA[t][c][i]);
        if (total_mass > 0 && out / total_mass > 0.01) {
            std::ostringstream os;
            os << "Y-norm band sum misses " << 100 * out / total_mass << "% of the potential's L² mass";
            warn("band-truncation", os.str());
        }
    }

    const double inv = 1.0 / static_cast<double>(M);
    auto invert = [&](const ComplexField& spec, const std::vector<double>& band, const cplx* m1, const cplx* m2) {
        ComplexField z(M);
        for (std::size_t i = 0; i < M; ++i) {
            cplx v = spec[i] * (band[i] * inv);
            if (m1) v *= m1[i];
            if (m2) v *= m2[i];
            z[i] = v;
        }
        fft_inplace(g, z, +1);
        return z;
    };
    std::vector<std::vector<cplx>> D(n);
    for (int a = 0; a < n; ++a) D[a] = derivative_multiplier(g, a);

    auto magnitude = [&](const std::vector<ComplexField>& f, std::size_t i) {
        double s = 0;
        for (const auto& c : f) s += c[i].real() * c[i].real();
        return std::sqrt(s);
    };

    // Y0 unbanded parts
    if (mask & kY0) {
        std::vector<double> grad(S), sup(S);
        std::vector<double> ones(M, 1.0);
        for (std::size_t t = 0; t < S; ++t) {
            std::vector<ComplexField> J;
            for (int c = 0; c < n; ++c)
                for (int a = 0; a < n; ++a) J.push_back(invert(specA[t][c], ones, D[a].data(), nullptr));
            double gm = 0;
            for (std::size_t i = 0; i < M; ++i) gm = std::max(gm, magnitude(J, i));
            grad[t] = gm;
            double am = 0;
            for (std::size_t i = 0; i < M; ++i) {
                double s = 0;
                for (int c = 0; c < n; ++c) s += A.values[t][c][i] * A.values[t][c][i];
                am = std::max(am, std::sqrt(s));
            }
            sup[t] = am;
        }
        double g1 = time_norm(grad, times, 1.0), a2 = time_norm(sup, times, 2.0);
        rep.y0.rows.push_back({"grad_L1Linf", 0, false, g1});
        rep.y0.rows.push_back({"L2Linf", 0, false, a2});
        rep.y0.value = g1 + a2;
    }

    double y0_band_sq = 0;
    WeightedSum y1{&rep.y1, "L_inf_L1"}, y1t{&rep.y1_tilde, "L_inf_Lp0_L1"};
    WeightedSum y2a{&rep.y2, "A_k"}, y2d{&rep.y2, "d2_dt"}, y3a{&rep.y3, "A_k"}, y3d{&rep.y3, "d2_dt"};
    WeightedSum c1{&rep.cor90, "Linf_L1_A"}, c2{&rep.cor90, "Linf_L1_dtA"}, c3{&rep.cor90, "L1_L1_A"},
        c4{&rep.cor90, "L1_L1_dtA"};

    // Hessian index pairs
    std::vector<std::pair<int, int>> hpairs;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) hpairs.push_back({a, b});

    for (int k = range.k_min; k <= range.k_max; ++k) {
        auto band = band_multiplier(g, k);
        // banded component fields per slice
        std::vector<std::vector<ComplexField>> Ak(S), Hk, Tk;
        if (need_hess) Hk.resize(S);
        if (need_dt) Tk.resize(S);
        std::vector<RealField> amag(S, RealField(M)), tmag;
        if (need_dt) tmag.assign(S, RealField(M));
        for (std::size_t t = 0; t < S; ++t) {
            for (int c = 0; c < n; ++c) {
                Ak[t].push_back(invert(specA[t][c], band, nullptr, nullptr));
                if (need_dt) Tk[t].push_back(invert(specT[t][c], band, nullptr, nullptr));
                if (need_hess)
                    for (auto [a, b] : hpairs) Hk[t].push_back(invert(specA[t][c], band, D[a].data(), D[b].data()));
            }
            for (std::size_t i = 0; i < M; ++i) amag[t][i] = magnitude(Ak[t], i);
            if (need_dt)
                for (std::size_t i = 0; i < M; ++i) tmag[t][i] = magnitude(Tk[t], i);
        }
        auto per_slice = [&](const std::vector<RealField>& f, double p) {
            std::vector<double> v(S);
            for (std::size_t t = 0; t < S; ++t) v[t] = lp_norm(g, f[t], p);
            return v;
        };
        double kk = static_cast<double>(k);
        if (mask & kY0) {
            double v = time_norm(per_slice(amag, n / P.h), times, 1.0);
            double w = std::pow(2.0, 2 * kk * (1 + P.h)) * v * v;
            rep.y0.rows.push_back({"band_L1_Ln/h^2", k, true, w});
            y0_band_sq += w;
        }
        if (mask & (kY1 | kCor90)) {
            auto l1 = per_slice(amag, 1.0);
            double linf = time_norm(l1, times, INFINITY);
            if (mask & kY1) y1.add(k, std::pow(2.0, kk * (n - 1)) * linf);
            if (mask & kCor90) {
                auto t1 = per_slice(tmag, 1.0);
                c1.add(k, std::pow(2.0, kk * (n - 1)) * linf);
                c2.add(k, std::pow(2.0, kk * (n - 3)) * time_norm(t1, times, INFINITY));
                c3.add(k, std::pow(2.0, kk * (n + 1)) * time_norm(l1, times, 1.0));
                c4.add(k, std::pow(2.0, kk * (n - 1)) * time_norm(t1, times, 1.0));
            }
        }
        if (!rotated) continue;

        // Rotated profiles, memoized by rotation matrix.
        std::map<std::array<double, 9>, Profile> memo;
        const std::size_t nA = n, nH = need_hess ? n * hpairs.size() : 0, nT = need_dt ? n : 0;
        auto profile = [&](const Rotation& U) -> const Profile& {
            auto it = memo.find(U.m);
            if (it != memo.end()) return it->second;
            Profile pr;
            pr.a2.assign(shifts.size(), std::vector<double>(S));
            pr.d2 = pr.ap = pr.a2;
            RealField am(M), dm(M);
            for (std::size_t s = 0; s < shifts.size(); ++s) {
                const auto& a = shifts[s];
                bool zero = a[0] == 0 && a[1] == 0 && a[2] == 0;
                for (std::size_t t = 0; t < S; ++t) {
                    // pack real fields in pairs
                    std::vector<const ComplexField*> real_fields;
                    for (auto& f : Ak[t]) real_fields.push_back(&f);
                    if (nH)
                        for (auto& f : Hk[t]) real_fields.push_back(&f);
                    if (nT)
                        for (auto& f : Tk[t]) real_fields.push_back(&f);
                    std::vector<ComplexField> packed;
                    for (std::size_t j = 0; j < real_fields.size(); j += 2) {
                        ComplexField z(M);
                        const auto& x = *real_fields[j];
                        const ComplexField* y = j + 1 < real_fields.size() ? real_fields[j + 1] : nullptr;
                        for (std::size_t i = 0; i < M; ++i) z[i] = cplx(x[i].real(), y ? (*y)[i].real() : 0.0);
                        if (!zero) z = translate_field(g, z, std::span<const double>(a.data(), n));
                        packed.push_back(std::move(z));
                    }
                    rotate_fields(g, packed, U);
                    auto value = [&](std::size_t j, std::size_t i) {
                        const cplx& z = packed[j / 2][i];
                        return j % 2 == 0 ? z.real() : z.imag();
                    };
                    for (std::size_t i = 0; i < M; ++i) {
                        double sa = 0, sh = 0, st = 0;
                        std::size_t j = 0;
                        for (; j < nA; ++j) sa += value(j, i) * value(j, i);
                        for (std::size_t h = 0; h < nH; ++h, ++j) {
                            double v = value(j, i);
                            auto [pa, pb] = hpairs[h % hpairs.size()];
                            sh += (pa == pb ? 1.0 : 2.0) * v * v;
                        }
                        for (std::size_t h = 0; h < nT; ++h, ++j) st += value(j, i) * value(j, i);
                        am[i] = std::sqrt(sa);
                        dm[i] = std::sqrt(sh) + std::sqrt(st);
                    }
                    pr.a2[s][t] = anisotropic_slice(g, am, 2.0, 1.0);
                    pr.d2[s][t] = nH ? anisotropic_slice(g, dm, 2.0, 1.0) : 0.0;
                    pr.ap[s][t] = (mask & kY1Tilde) ? anisotropic_slice(g, am, p0, 1.0) : 0.0;
                }
            }
            return memo.emplace(U.m, std::move(pr)).first->second;
        };
        auto sup = [&](auto&& f) { return sup_over_rotations([&](const Rotation& U) { return f(profile(U)); }, sampler).value; };
        if (mask & kY1Tilde)
            y1t.add(k, std::pow(2.0, kk * (n - 1) / p0) * sup([&](const Profile& p) { return fold_const(p.ap, times, INFINITY); }));
        if (mask & kY2) {
            y2a.add(k, std::pow(2.0, kk * (n - 1) / 2) * sup([&](const Profile& p) { return fold_const(p.a2, times, INFINITY); }));
            y2d.add(k, std::pow(2.0, kk * (n - 5) / 2) * sup([&](const Profile& p) { return fold_path(p.d2, times, INFINITY); }));
        }
        if (mask & kY3) {
            y3a.add(k, std::pow(2.0, kk * (n + 3) / 2) * sup([&](const Profile& p) { return fold_const(p.a2, times, 1.0); }));
            y3d.add(k, std::pow(2.0, kk * (n - 1) / 2) * sup([&](const Profile& p) { return fold_path(p.d2, times, 1.0); }));
        }
    }
    if (mask & kY0) rep.y0.value += std::sqrt(y0_band_sq);
    rep.y1.value = y1.total;
    rep.y1_tilde.value = y1t.total;
    rep.y2.value = y2a.total + y2d.total;
    rep.y3.value = y3a.total + y3d.total;
    rep.cor90.value = c1.total + c2.total + c3.total + c4.total;
    return rep;
}

YNormValue y0_norm(const VectorPotential& A, const YNormParams& p) { return y_norms(A, p, kY0).y0; }
YNormValue y1_norm(const VectorPotential& A) { return y_norms(A, default_ynorm_params(A.dim()), kY1).y1; }
YNormValue y1_tilde_norm(const VectorPotential& A, double p0, const YNormParams& p) {
    YNormParams q = p;
    q.p0 = p0;
    return y_norms(A, q, kY1Tilde).y1_tilde;
}
YNormValue y2_norm(const VectorPotential& A, const YNormParams& p) { return y_norms(A, p, kY2).y2; }
YNormValue y3_norm(const VectorPotential& A, const YNormParams& p) { return y_norms(A, p, kY3).y3; }
YNormValue corollary90_norm(const VectorPotential& A) {
    return y_norms(A, default_ynorm_params(A.dim()), kCor90).cor90;
}

}  // namespace magschro
