#include "magschro/solver.hpp"

#include "magschro/diagnostics.hpp"
#include "magschro/error_terms.hpp"
#include "magschro/fourier.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

namespace magschro {

namespace {

// 2/3 rule: drop a mode when 3|m| > N on any axis.
std::vector<double> dealias_mask(const Grid& g, bool on) {
    std::vector<double> m(g.size(), 1.0);
    if (!on) return m;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto ijk = g.unravel(i);
        for (int a = 0; a < g.dim; ++a)
            if (3 * std::abs(g.signed_mode(ijk[a])) > g.points) m[i] = 0;
    }
    return m;
}

// Lagrange weights at t for the 4 nodes around it.
std::pair<std::size_t, std::array<double, 4>> lagrange4(const std::vector<double>& times, double t) {
    const std::size_t S = times.size();
    if (S == 0) throw InvalidArgument("no slices to interpolate");
    std::array<double, 4> w{0, 0, 0, 0};
    if (S == 1) {
        w[0] = 1;
        return {0, w};
    }
    std::size_t i = 0;
    while (i + 2 < S && times[i + 1] <= t) ++i;
    std::size_t m = std::min<std::size_t>(4, S);
    std::size_t first = i >= 1 ? i - 1 : 0;
    if (first + m > S) first = S - m;
    for (std::size_t a = 0; a < m; ++a) {
        double l = 1;
        for (std::size_t b = 0; b < m; ++b)
            if (b != a) l *= (t - times[first + b]) / (times[first + a] - times[first + b]);
        w[a] = l;
    }
    return {first, w};
}

// Fornberg weights for the first derivative at x0.
std::vector<double> fd_weights(const std::vector<double>& x, double x0) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
    double c1 = 1, c4 = x[0] - x0;
    c[0][0] = 1;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, 1);
        double c2 = 1, c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

double slice_l2(const Grid& g, const ComplexField& f) { return l2_norm(g, f); }

double l1l2(const SpaceTimeField& u) {
    std::vector<double> v(u.slice_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = slice_l2(u.grid, u.slices[i]);
    return time_norm(v, u.times, 1.0);
}

double jacobian_sup(const Grid& g, const std::vector<RealField>& A, bool divergence_only) {
    std::vector<ComplexField> d;
    for (int c = 0; c < g.dim; ++c)
        for (int a = 0; a < g.dim; ++a)
            if (!divergence_only || a == c) d.push_back(spectral_derivative(g, to_complex(A[c]), a));
    double m = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = 0;
        if (divergence_only) {
            for (const auto& f : d) s += f[i].real();
            s = std::abs(s);
        } else {
            for (const auto& f : d) s += f[i].real() * f[i].real();
            s = std::sqrt(s);
        }
        m = std::max(m, s);
    }
    return m;
}

}  // namespace

PotentialSource PotentialSource::none(const Grid& g) {
    PotentialSource s;
    s.grid = g;
    s.zero = true;
    s.divergence_free = true;
    s.at = [g](double) { return std::vector<RealField>(g.dim, RealField(g.size(), 0.0)); };
    return s;
}

PotentialSource PotentialSource::constant(const Grid& g, const std::array<double, 3>& a) {
    PotentialSource s;
    s.grid = g;
    s.divergence_free = true;
    s.zero = a[0] == 0 && a[1] == 0 && a[2] == 0;
    std::vector<RealField> v(g.dim);
    for (int c = 0; c < g.dim; ++c) v[c].assign(g.size(), a[c]);
    s.at = [v](double) { return v; };
    return s;
}

PotentialSource PotentialSource::preset(const Grid& g, const PresetParams& p) {
    check_preset_resolvable(g, p);
    PotentialSource s;
    s.grid = g;
    s.zero = p.eps == 0;
    s.divergence_free = p.kind == PresetKind::curl || s.zero;
    if (preset_time_independent(p)) {
        auto v = sample_preset(g, p, 0.0);
        s.at = [v](double) { return v; };
    } else {
        s.at = [g, p](double t) { return sample_preset(g, p, t); };
    }
    return s;
}

PotentialSource PotentialSource::sampled(const VectorPotential& A) {
    PotentialSource s;
    s.grid = A.grid;
    s.divergence_free = A.divergence_free;
    s.zero = max_abs(A) == 0;
    auto data = std::make_shared<VectorPotential>(A);
    s.at = [data](double t) {
        auto [first, w] = lagrange4(data->times, t);
        std::vector<RealField> out(data->dim(), RealField(data->grid.size(), 0.0));
        for (std::size_t a = 0; a < 4 && first + a < data->slice_count(); ++a) {
            if (w[a] == 0) continue;
            for (int c = 0; c < data->dim(); ++c)
                for (std::size_t i = 0; i < out[c].size(); ++i) out[c][i] += w[a] * data->values[first + a][c][i];
        }
        return out;
    };
    return s;
}

PotentialSource PotentialSource::scaled(const PotentialSource& src, double a) {
    PotentialSource s = src;
    auto inner = src.at;
    s.zero = src.zero || a == 0;
    s.at = [inner, a](double t) {
        auto v = inner(t);
        for (auto& c : v)
            for (auto& x : c) x *= a;
        return v;
    };
    return s;
}

ForcingSource ForcingSource::none() {
    ForcingSource f;
    f.zero = true;
    return f;
}

ForcingSource ForcingSource::callable(std::function<ComplexField(double)> fn) {
    ForcingSource f;
    f.zero = false;
    f.at = std::move(fn);
    return f;
}

ForcingSource ForcingSource::sampled(const SpaceTimeField& F) {
    auto data = std::make_shared<SpaceTimeField>(F);
    return callable([data](double t) {
        auto [first, w] = lagrange4(data->times, t);
        ComplexField out(data->grid.size(), 0.0);
        for (std::size_t a = 0; a < 4 && first + a < data->slice_count(); ++a) {
            if (w[a] == 0) continue;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[a] * data->slices[first + a][i];
        }
        return out;
    });
}

ForcingSource ForcingSource::scaled(const ForcingSource& src, cplx a) {
    if (src.zero || a == 0.0) return none();
    auto inner = src.at;
    return callable([inner, a](double t) {
        auto v = inner(t);
        for (auto& x : v) x *= a;
        return v;
    });
}

Integrator::Integrator(const Grid& g, PotentialSource A, ForcingSource F, SolverConfig cfg)
    : g_(g), A_(std::move(A)), F_(std::move(F)), cfg_(cfg) {
    if (!(cfg_.dt > 0)) throw InvalidArgument("solver dt must be positive");
    if (!A_.grid.same_space(g)) throw InvalidArgument("potential lives on a different lattice");
    const auto& T = lattice_tables(g);
    xi2_.resize(g.size());
    for (std::size_t i = 0; i < xi2_.size(); ++i) xi2_[i] = T.xi_norm[i] * T.xi_norm[i];
    dealias_ = dealias_mask(g, cfg_.dealias);
    for (int a = 0; a < g.dim; ++a) D_.push_back(derivative_multiplier(g, a));
}

void Integrator::rhs(const ComplexField& spec, double t, ComplexField& out) const {
    const std::size_t M = g_.size();
    out.assign(M, 0.0);
    if (!A_.zero) {
        auto A = A_.at(t);
        const double inv = 1.0 / static_cast<double>(M);
        ComplexField prod(M, 0.0), d(M);
        for (int a = 0; a < g_.dim; ++a) {
            for (std::size_t i = 0; i < M; ++i) d[i] = spec[i] * D_[a][i] * inv;
            fft_inplace(g_, d, +1);
            for (std::size_t i = 0; i < M; ++i) prod[i] += A[a][i] * d[i];
        }
        fft_inplace(g_, prod, -1);
        for (std::size_t i = 0; i < M; ++i) out[i] = -dealias_[i] * prod[i];
    }
    if (!F_.zero) {
        auto f = F_.at(t);
        fft_inplace(g_, f, -1);
        for (std::size_t i = 0; i < M; ++i) out[i] += f[i];
    }
}

void Integrator::step(ComplexField& u, double t, double h) const {
    const std::size_t M = g_.size();
    std::vector<cplx> E1(M), E2(M);
    for (std::size_t i = 0; i < M; ++i) {
        double ph = -4 * kPi * kPi * xi2_[i];
        E1[i] = std::polar(1.0, ph * h);
        E2[i] = std::polar(1.0, ph * 0.5 * h);
    }
    if (A_.zero && F_.zero) {
        for (std::size_t i = 0; i < M; ++i) u[i] *= E1[i];
        return;
    }
    ComplexField k1, k2, k3, k4, s(M);
    rhs(u, t, k1);
    for (std::size_t i = 0; i < M; ++i) s[i] = E2[i] * (u[i] + 0.5 * h * k1[i]);
    rhs(s, t + 0.5 * h, k2);
    for (std::size_t i = 0; i < M; ++i) s[i] = E2[i] * u[i] + 0.5 * h * k2[i];
    rhs(s, t + 0.5 * h, k3);
    for (std::size_t i = 0; i < M; ++i) s[i] = E1[i] * u[i] + h * E2[i] * k3[i];
    rhs(s, t + h, k4);
    for (std::size_t i = 0; i < M; ++i)
        u[i] = E1[i] * u[i] + h / 6 * (E1[i] * k1[i] + 2.0 * E2[i] * (k2[i] + k3[i]) + k4[i]);
}

ComplexField Integrator::advance(std::span<const cplx> f, double s, double t) const {
    if (f.size() != g_.size()) throw InvalidArgument("field size mismatch");
    ComplexField spec(f.begin(), f.end());
    if (t == s) return spec;
    fft_inplace(g_, spec, -1);
    auto n = static_cast<long>(std::ceil(std::abs(t - s) / cfg_.dt - 1e-9));
    n = std::max(n, 1L);
    double h = (t - s) / static_cast<double>(n);
    for (long j = 0; j < n; ++j) step(spec, s + j * h, h);
    const double inv = 1.0 / static_cast<double>(g_.size());
    fft_inplace(g_, spec, +1);
    for (auto& v : spec) v *= inv;
    return spec;
}

void check_cfl(const Grid& g, const PotentialSource& A, const SolverConfig& cfg, const std::vector<double>& times) {
    if (A.zero) return;
    double amax = 0;
    for (double t : times) {
        auto a = A.at(t);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double s = 0;
            for (const auto& c : a) s += c[i] * c[i];
            amax = std::max(amax, std::sqrt(s));
        }
    }
    double limit = cfg.cfl_safety * g.dx() / std::max(1.0, amax);
    if (cfg.dt > limit) {
        std::ostringstream os;
        os << "CFL violated: dt = " << cfg.dt << " exceeds " << limit << " (max |A| = " << amax << ")";
        throw InvalidArgument(os.str());
    }
}

namespace {

void leakage_guard(const Grid& g, std::span<const cplx> f) {
    double frac = nyquist_mass_fraction(g, f);
    if (frac > 1e-6) {
        std::ostringstream os;
        os << "initial data carries " << frac << " of its mass near Nyquist";
        warn("nyquist-leakage", os.str());
    }
}

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw InvalidArgument("no output times");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw InvalidArgument("output times must increase");
}

}  // namespace

std::vector<double> uniform_times(double T, double out_dt) {
    if (!(out_dt > 0) || T < 0) throw InvalidArgument("bad output times");
    auto n = static_cast<long>(std::llround(T / out_dt));
    if (std::abs(n * out_dt - T) > 1e-9 * std::max(1.0, T)) throw InvalidArgument("T must be a multiple of out_dt");
    std::vector<double> t(n + 1);
    for (long i = 0; i <= n; ++i) t[i] = i * out_dt;
    t[n] = T;
    return t;
}

SpaceTimeField solve(const Grid& g, std::span<const cplx> f, const PotentialSource& A, const ForcingSource& F,
                     const std::vector<double>& times, const SolverConfig& cfg) {
    check_times(times);
    check_cfl(g, A, cfg, times);
    leakage_guard(g, f);
    Integrator I(g, A, F, cfg);
    SpaceTimeField u = SpaceTimeField::zeros(g, times);
    u.slices[0].assign(f.begin(), f.end());
    const double inv = 1.0 / static_cast<double>(g.size());
    ComplexField spec(f.begin(), f.end());
    fft_inplace(g, spec, -1);
    for (std::size_t j = 1; j < times.size(); ++j) {
        double s = times[j - 1], t = times[j];
        auto n = std::max(1L, static_cast<long>(std::ceil((t - s) / cfg.dt - 1e-9)));
        double h = (t - s) / static_cast<double>(n);
        for (long m = 0; m < n; ++m) I.step(spec, s + m * h, h);
        ComplexField out = spec;
        fft_inplace(g, out, +1);
        for (auto& v : out) v *= inv;
        u.slices[j] = std::move(out);
    }
    return u;
}

SpaceTimeField duhamel_solve(const Grid& g, std::span<const cplx> f, const PotentialSource& A, const ForcingSource& F,
                             const std::vector<double>& times, const SolverConfig& cfg) {
    check_times(times);
    check_cfl(g, A, cfg, times);
    leakage_guard(g, f);
    Integrator U(g, A, ForcingSource::none(), cfg);
    SpaceTimeField u = SpaceTimeField::zeros(g, times);
    u.slices[0].assign(f.begin(), f.end());
    const std::size_t M = g.size();
    const double inv = 1.0 / static_cast<double>(M);
    auto spectrum = [&](double t) {
        auto z = F.at(t);
        fft_inplace(g, z, -1);
        return z;
    };
    ComplexField w(f.begin(), f.end());
    fft_inplace(g, w, -1);
    for (std::size_t j = 1; j < times.size(); ++j) {
        double s = times[j - 1], t = times[j];
        auto n = std::max(1L, static_cast<long>(std::ceil((t - s) / cfg.dt - 1e-9)));
        double h = (t - s) / static_cast<double>(n);
        for (long m = 0; m < n; ++m) {
            double tau = s + m * h;
            if (F.zero) {
                U.step(w, tau, h);
                continue;
            }
            auto F0 = spectrum(tau), Fm = spectrum(tau + 0.5 * h), F1 = spectrum(tau + h);
            for (std::size_t i = 0; i < M; ++i) w[i] += h / 6 * F0[i];
            U.step(w, tau, h);
            for (std::size_t i = 0; i < M; ++i) Fm[i] *= 2 * h / 3;
            U.step(Fm, tau + 0.5 * h, 0.5 * h);
            for (std::size_t i = 0; i < M; ++i) w[i] += Fm[i] + h / 6 * F1[i];
        }
        ComplexField out = w;
        fft_inplace(g, out, +1);
        for (auto& v : out) v *= inv;
        u.slices[j] = std::move(out);
    }
    return u;
}

Propagator::Propagator(const Grid& g, PotentialSource A, SolverConfig cfg)
    : I_(g, std::move(A), ForcingSource::none(), cfg) {}

ComplexField Propagator::apply(std::span<const cplx> f, double t, double s) const { return I_.advance(f, s, t); }

double propagator_compose_check(const Propagator& U, double s, double t, const std::vector<ComplexField>& probes) {
    if (!(s >= 0 && t >= s)) throw InvalidArgument("compose check needs 0 <= s <= t");
    double worst = 0;
    for (const auto& f : probes) {
        auto direct = U.apply(f, t, 0.0);
        auto composed = U.apply(U.apply(f, s, 0.0), t, s);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            num += std::norm(composed[i] - direct[i]);
            den += std::norm(f[i]);
        }
        if (den > 0) worst = std::max(worst, std::sqrt(num / den));
    }
    return worst;
}

namespace {

// ∂_t u - iΔu slice by slice via the free-flow integrating factor.
SpaceTimeField schrodinger_part(const SpaceTimeField& u) {
    const Grid& g = u.grid;
    const std::size_t S = u.slice_count(), M = g.size();
    if (S < 3) throw InvalidArgument("residual needs at least three slices");
    const auto& T = lattice_tables(g);
    std::vector<ComplexField> w(S);
    for (std::size_t j = 0; j < S; ++j) {
        w[j] = u.slices[j];
        fft_inplace(g, w[j], -1);
        for (std::size_t i = 0; i < M; ++i)
            w[j][i] *= std::polar(1.0, 4 * kPi * kPi * T.xi_norm[i] * T.xi_norm[i] * u.times[j]);
    }
    SpaceTimeField out = SpaceTimeField::zeros(g, u.times);
    const std::size_t m = std::min<std::size_t>(7, S);
    const double inv = 1.0 / static_cast<double>(M);
    for (std::size_t j = 0; j < S; ++j) {
        std::size_t first = j >= m / 2 ? j - m / 2 : 0;
        if (first + m > S) first = S - m;
        std::vector<double> nodes(u.times.begin() + first, u.times.begin() + first + m);
        auto c = fd_weights(nodes, u.times[j]);
        ComplexField d(M, 0.0);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t i = 0; i < M; ++i) d[i] += c[a] * w[first + a][i];
        for (std::size_t i = 0; i < M; ++i)
            d[i] *= std::polar(1.0, -4 * kPi * kPi * T.xi_norm[i] * T.xi_norm[i] * u.times[j]) * inv;
        fft_inplace(g, d, +1);
        out.slices[j] = std::move(d);
    }
    return out;
}

}  // namespace

SpaceTimeField equation_residual(const SpaceTimeField& u, const PotentialSource& A, const ForcingSource& F,
                                 bool dealias) {
    auto r = schrodinger_part(u);
    const Grid& g = u.grid;
    const auto mask = dealias_mask(g, dealias);
    for (std::size_t j = 0; j < u.slice_count(); ++j) {
        if (!A.zero) {
            auto adv = spectral_gradient_dot(g, A.at(u.times[j]), u.slices[j]);
            if (dealias) {
                fft_inplace(g, adv, -1);
                for (std::size_t i = 0; i < g.size(); ++i) adv[i] *= mask[i] / static_cast<double>(g.size());
                fft_inplace(g, adv, +1);
            }
            for (std::size_t i = 0; i < g.size(); ++i) r.slices[j][i] += adv[i];
        }
        if (!F.zero) {
            auto f = F.at(u.times[j]);
            for (std::size_t i = 0; i < g.size(); ++i) r.slices[j][i] -= f[i];
        }
    }
    return r;
}

EnergyBound energy_bound_check(const SpaceTimeField& u, const PotentialSource& A, const ForcingSource& F) {
    const Grid& g = u.grid;
    EnergyBound e;
    const std::size_t S = u.slice_count();
    std::vector<double> fn(S, 0.0), gr(S, 0.0), dv(S, 0.0);
    for (std::size_t j = 0; j < S; ++j) {
        e.sup_norm = std::max(e.sup_norm, l2_norm(g, u.slices[j]));
        if (!F.zero) fn[j] = l2_norm(g, F.at(u.times[j]));
        if (!A.zero) {
            auto a = A.at(u.times[j]);
            gr[j] = jacobian_sup(g, a, false);
            dv[j] = jacobian_sup(g, a, true);
        }
    }
    e.data_norm = l2_norm(g, u.slices[0]);
    e.forcing = time_norm(fn, u.times, 1.0);
    e.grad = time_norm(gr, u.times, 1.0);
    e.div = time_norm(dv, u.times, 1.0);
    e.premise = e.grad < 0.5;
    e.c4_bound = 4 * (e.data_norm + e.forcing);
    double denom = e.data_norm + e.forcing;
    e.effective_c = denom > 0 ? e.sup_norm / denom : 0.0;
    if (!e.premise || e.div >= 1) {
        warn("energy-premise", "‖∇A‖_{L¹L^∞} >= 1/2, energy bound check skipped");
        e.pass = false;
        return e;
    }
    double d = e.div, phi = e.forcing, f = e.data_norm;
    e.tight_bound = (phi + std::sqrt(phi * phi + (1 - d) * f * f)) / (1 - d);
    e.pass = e.sup_norm <= e.tight_bound * (1 + 1e-9) + 1e-14;
    return e;
}

ReducedEquationResidual lp_reduced_equation_check(const SpaceTimeField& u, const PotentialSource& A,
                                                  const ForcingSource& F, int k) {
    const Grid& g = u.grid;
    ReducedEquationResidual out;
    out.k = k;
    auto uk = band_piece(u, k);
    auto r = schrodinger_part(uk);
    auto full = band_piece(equation_residual(u, A, F, false), k);
    SpaceTimeField lo = SpaceTimeField::zeros(g, u.times), Ek = lo, Fk = lo;
    for (std::size_t j = 0; j < u.slice_count(); ++j) {
        auto a = A.at(u.times[j]);
        lo.slices[j] = low_band_transport(g, a, u.slices[j], k);
        Ek.slices[j] = error_term_slice(g, a, u.slices[j], k).direct;
        if (!F.zero) Fk.slices[j] = band_piece(g, F.at(u.times[j]), k);
        for (std::size_t i = 0; i < g.size(); ++i) r.slices[j][i] += lo.slices[j][i] + Ek.slices[j][i] - Fk.slices[j][i];
    }
    out.residual = l1l2(r);
    out.band_residual = l1l2(full);
    out.identity_gap = l1l2(difference(r, full));
    out.scale = l1l2(Fk) + l1l2(lo) + l1l2(Ek);
    return out;
}

}  // namespace magschro
