#include "magschro/parametrix.hpp"

#include "magschro/diagnostics.hpp"
#include "magschro/error_terms.hpp"
#include "magschro/fourier.hpp"
#include "magschro/littlewood_paley.hpp"
#include "magschro/mixed_norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace magschro {

namespace {

constexpr int kGaussPoints = 20;

double profile_value(RayProfile p, const CutoffPair& cut, double u) {
    switch (p) {
        case RayProfile::chi: return cut.chi(u);
        case RayProfile::chi_d1: return cut.chi_d1(u);
        case RayProfile::chi_d2: return cut.chi_d2(u);
    }
    return 0;
}

// ∫_a^b e^{2πiru} profile(u) du on the glue interval.
cplx glue_integral(RayProfile p, const CutoffPair& cut, double r) {
    const double a = cut.transition_begin(), b = cut.transition_end();
    const int panels = std::max(8, static_cast<int>(std::ceil(std::abs(r) * (b - a) * 8)));
    const auto& G = gauss_legendre(kGaussPoints);
    const double h = (b - a) / panels;
    cplx s = 0;
    for (int q = 0; q < panels; ++q) {
        const double m = a + (q + 0.5) * h;
        for (int i = 0; i < kGaussPoints; ++i) {
            double u = m + 0.5 * h * G.nodes[i];
            s += 0.5 * h * G.weights[i] * profile_value(p, cut, u) * std::polar(1.0, kTwoPi * r * u);
        }
    }
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double l1l2(const SpaceTimeField& u) {
    std::vector<double> n(u.slice_count());
    for (std::size_t j = 0; j < n.size(); ++j) n[j] = l2_norm(u.grid, u.slices[j]);
    return time_norm(n, u.times, 1.0);
}

// Per-axis tables e^{2πi ξ_a x_a}, [fft index][coordinate].
std::vector<cplx> axis_waves(const Grid& g) {
    const int N = g.points;
    std::vector<cplx> t(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) t[i * N + j] = std::polar(1.0, kTwoPi * g.frequency(i) * g.coordinate(j));
    return t;
}

void plane_wave(const Grid& g, const std::vector<cplx>& axis, const std::array<int, 3>& idx, ComplexField& out) {
    const int N = g.points;
    const std::size_t M = g.size();
    out.resize(M);
    for (std::size_t s = 0; s < M; ++s) {
        auto x = g.unravel(s);
        cplx w = axis[idx[0] * N + x[0]];
        for (int a = 1; a < g.dim; ++a) w *= axis[idx[a] * N + x[a]];
        out[s] = w;
    }
}

}  // namespace

cplx ray_weight(RayProfile p, double c, double s, const CutoffPair& cut) {
    if (!(c > 0)) throw InvalidArgument("ray weight needs c > 0");
    const double r = s / c;
    cplx w = glue_integral(p, cut, r);
    if (p == RayProfile::chi) {
        const double a = cut.transition_begin(), th = kPi * r * a;
        const double sinc = std::abs(th) < 1e-8 ? 1 - th * th / 6 : std::sin(th) / th;
        w += a * sinc * std::polar(1.0, th);
    }
    return w / c;
}

ComplexField ray_transform(const Grid& g, std::span<const cplx> f, std::span<const double> theta, double c,
                           RayProfile p, const CutoffPair& cut) {
    if (static_cast<int>(theta.size()) != g.dim) throw InvalidArgument("direction has the wrong dimension");
    const auto& T = lattice_tables(g);
    std::vector<cplx> m(g.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = ray_weight(p, c, dot({T.xi.data() + i * g.dim, std::size_t(g.dim)}, theta), cut);
    return apply_multiplier(g, f, m);
}

ComplexField ray_transform_quadrature(const Grid& g, std::span<const cplx> f, std::span<const double> theta, double c,
                                      RayProfile p, double step, const CutoffPair& cut) {
    if (static_cast<int>(theta.size()) != g.dim) throw InvalidArgument("direction has the wrong dimension");
    if (!(step > 0)) throw InvalidArgument("quadrature step must be positive");
    const double z0 = p == RayProfile::chi ? 0.0 : cut.transition_begin() / c, z1 = cut.transition_end() / c;
    // panel edges land on the glue start so the kink of χ sits on a node boundary
    std::vector<double> edges{z0};
    if (p == RayProfile::chi) {
        const double a = cut.transition_begin() / c;
        const int n1 = std::max(1, static_cast<int>(std::ceil(a / step)));
        for (int q = 1; q <= n1; ++q) edges.push_back(a * q / n1);
    }
    const double zs = edges.back();
    const int n2 = std::max(1, static_cast<int>(std::ceil((z1 - zs) / step)));
    for (int q = 1; q <= n2; ++q) edges.push_back(zs + (z1 - zs) * q / n2);
    const auto& G = gauss_legendre(8);
    std::vector<double> zn, wn;
    for (std::size_t q = 0; q + 1 < edges.size(); ++q) {
        const double m = 0.5 * (edges[q] + edges[q + 1]), h = edges[q + 1] - edges[q];
        for (std::size_t i = 0; i < G.nodes.size(); ++i) {
            double z = m + 0.5 * h * G.nodes[i];
            zn.push_back(z);
            wn.push_back(0.5 * h * G.weights[i] * profile_value(p, cut, c * z));
        }
    }
    const auto& T = lattice_tables(g);
    std::vector<cplx> mult(g.size());
    parallel_for(g.size(), [&](std::size_t i) {
        const double s = dot({T.xi.data() + i * g.dim, std::size_t(g.dim)}, theta);
        cplx acc = 0;
        for (std::size_t q = 0; q < zn.size(); ++q) acc += wn[q] * std::polar(1.0, kTwoPi * s * zn[q]);
        mult[i] = acc;
    });
    return apply_multiplier(g, f, mult);
}

// ---------------------------------------------------------------- PhaseField

PhaseField::PhaseField(const Grid& g, const PotentialSource& A, const std::vector<double>& times, PhaseOptions opt,
                       const CutoffPair& cut)
    : g_(g), times_(times), opt_(opt), cut_(cut) {
    if (!A.grid.same_space(g)) throw InvalidArgument("potential lives on a different lattice");
    if (times_.empty()) throw InvalidArgument("phase needs at least one time");
    if (!(opt_.kappa > 0)) throw InvalidArgument("kappa must be positive");
    const std::size_t M = g.size(), S = times_.size();
    const int n = g.dim;
    const double delta = 2e-3;
    A_.resize(S);
    dA_.resize(S);
    std::vector<std::vector<ComplexField>> spec(S), dspec(S);
    for (std::size_t j = 0; j < S; ++j) {
        const double t = times_[j];
        if (A.zero) {
            A_[j].assign(n, RealField(M, 0.0));
            dA_[j] = A_[j];
        } else {
            A_[j] = A.at(t);
            std::vector<std::vector<RealField>> nb;
            // 4th order; forward one-sided near t = 0 so sampled sources stay in range
            const bool fwd = t < 2 * delta;
            const std::vector<double> off = fwd ? std::vector<double>{0, 1, 2, 3, 4} : std::vector<double>{-2, -1, 1, 2};
            const std::vector<double> wt = fwd ? std::vector<double>{-25, 48, -36, 16, -3} : std::vector<double>{1, -8, 8, -1};
            dA_[j].assign(n, RealField(M, 0.0));
            for (std::size_t q = 0; q < off.size(); ++q) {
                auto a = off[q] == 0 ? A_[j] : A.at(t + off[q] * delta);
                for (int c = 0; c < n; ++c)
                    for (std::size_t i = 0; i < M; ++i) dA_[j][c][i] += wt[q] * a[c][i] / (12 * delta);
            }
        }
        for (int c = 0; c < n; ++c) {
            for (auto& v : A_[j][c]) v *= opt_.amplitude;
            for (auto& v : dA_[j][c]) v *= opt_.amplitude;
            spec[j].push_back(fourier_forward(g, to_complex(A_[j][c])));
            dspec[j].push_back(fourier_forward(g, to_complex(dA_[j][c])));
        }
    }
    double peak = 0;
    for (std::size_t j = 0; j < S; ++j)
        for (int c = 0; c < n; ++c)
            for (std::size_t i = 0; i < M; ++i) peak = std::max({peak, std::abs(spec[j][c][i]), std::abs(dspec[j][c][i])});
    const auto& T = lattice_tables(g);
    const double limit = cut_.transition_end() / 16;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < M; ++i) {
        double m = 0;
        for (std::size_t j = 0; j < S; ++j)
            for (int c = 0; c < n; ++c) m = std::max({m, std::abs(spec[j][c][i]), std::abs(dspec[j][c][i])});
        if (m <= 1e-11 * peak || peak == 0) continue;  // FFT and difference rounding
        if (T.xi_norm[i] == 0) throw InvalidArgument("potential must have zero mean on the torus");
        if (T.xi_norm[i] > limit * (1 + 1e-12)) {
            std::ostringstream os;
            os << "potential has spectrum at |eta| = " << T.xi_norm[i] << " above the band limit " << limit;
            throw InvalidArgument(os.str());
        }
        idx.push_back(i);
    }
    const auto range = lattice_band_range(g, cut_);
    for (int k = range.k_min; k <= std::min(range.k_max, -2); ++k) {
        bool used = false;
        for (auto i : idx) used |= cut_.band(k, T.xi_norm[i]) != 0;
        if (used) bands_.push_back(k);
    }
    for (auto i : idx) {
        for (int a = 0; a < n; ++a) modes_.push_back(T.xi[i * n + a]);
        for (int k : bands_) phi_.push_back(cut_.band(k, T.xi_norm[i]));
    }
    coef_.resize(S);
    dcoef_.resize(S);
    for (std::size_t j = 0; j < S; ++j)
        for (auto i : idx)
            for (int c = 0; c < n; ++c) {
                coef_[j].push_back(spec[j][c][i]);
                dcoef_[j].push_back(dspec[j][c][i]);
            }
    const auto axis = axis_waves(g);
    waves_.resize(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) plane_wave(g, axis, g.unravel(idx[m]), waves_[m]);
    for (int k : bands_)
        if (cut_.transition_end() * std::pow(2.0, -2 * k) > g.length / 2) wraps_ = true;
}

std::vector<int> PhaseField::bands() const { return bands_; }

PhaseField::XiWeights PhaseField::weights(std::span<const double> xi) const {
    if (static_cast<int>(xi.size()) != g_.dim) throw InvalidArgument("xi has the wrong dimension");
    const double r = norm(xi);
    if (r == 0) throw InvalidArgument("phase needs xi != 0");
    XiWeights w;
    w.xi.assign(xi.begin(), xi.end());
    std::vector<double> th(xi.begin(), xi.end());
    for (auto& v : th) v /= r;
    const std::size_t B = bands_.size();
    for (std::size_t m = 0; m < mode_count(); ++m) {
        const double s = dot(mode(m), th);
        for (std::size_t b = 0; b < B; ++b) {
            const double c = std::pow(2.0, 2 * bands_[b]);
            const bool on = phi_[m * B + b] != 0;
            w.w0.push_back(on ? ray_weight(RayProfile::chi, c, s, cut_) : 0.0);
            w.w1.push_back(on ? ray_weight(RayProfile::chi_d1, c, s, cut_) : 0.0);
            w.w2.push_back(on ? ray_weight(RayProfile::chi_d2, c, s, cut_) : 0.0);
        }
    }
    return w;
}

std::vector<cplx> PhaseField::sigma0_coeffs(std::size_t slice, const XiWeights& w, bool time_derivative) const {
    const auto& C = time_derivative ? dcoef_.at(slice) : coef_.at(slice);
    const int n = g_.dim;
    const std::size_t B = bands_.size();
    const double r = norm(w.xi);
    std::vector<cplx> out(mode_count(), 0.0);
    for (std::size_t m = 0; m < mode_count(); ++m) {
        cplx ath = 0;
        for (int a = 0; a < n; ++a) ath += C[m * n + a] * (w.xi[a] / r);
        cplx s = 0;
        for (std::size_t b = 0; b < B; ++b) s += phi_[m * B + b] * w.w0[m * B + b];
        out[m] = ath * s / opt_.kappa;
    }
    return out;
}

std::vector<cplx> PhaseField::sigma1_coeffs(std::size_t slice, const XiWeights& w, bool time_derivative) const {
    const auto& C = time_derivative ? dcoef_.at(slice) : coef_.at(slice);
    const int n = g_.dim;
    const std::size_t B = bands_.size();
    std::vector<cplx> out(mode_count(), 0.0);
    for (std::size_t m = 0; m < mode_count(); ++m) {
        cplx axi = 0;
        for (int a = 0; a < n; ++a) axi += C[m * n + a] * w.xi[a];
        const double eta2 = dot(mode(m), mode(m));
        cplx s = 0;
        for (std::size_t b = 0; b < B; ++b) s += std::pow(2.0, 2 * bands_[b]) * phi_[m * B + b] * w.w1[m * B + b];
        out[m] = cplx(0, kTwoPi) * axi / (-4 * kPi * kPi * eta2) * s;
    }
    return out;
}

std::vector<cplx> PhaseField::e1_coeffs(std::size_t slice, const XiWeights& w) const {
    const auto& C = coef_.at(slice);
    const int n = g_.dim;
    const std::size_t B = bands_.size();
    const double r = norm(w.xi);
    std::vector<cplx> out(mode_count(), 0.0);
    for (std::size_t m = 0; m < mode_count(); ++m) {
        cplx axi = 0;
        for (int a = 0; a < n; ++a) axi += C[m * n + a] * w.xi[a];
        const double eta2 = dot(mode(m), mode(m));
        cplx s = 0;
        for (std::size_t b = 0; b < B; ++b) {
            const double c = std::pow(2.0, 2 * bands_[b]);
            s += c * c * phi_[m * B + b] * w.w2[m * B + b];
        }
        out[m] = cplx(0, -kTwoPi) * r * axi / (-4 * kPi * kPi * eta2) * s;
    }
    return out;
}

ComplexField PhaseField::synthesize(std::span<const cplx> coeffs) const {
    return synthesize(coeffs, [](std::span<const double>) { return cplx(1.0); });
}

ComplexField PhaseField::synthesize(std::span<const cplx> coeffs,
                                    const std::function<cplx(std::span<const double>)>& mult) const {
    if (coeffs.size() != mode_count()) throw InvalidArgument("coefficient count mismatch");
    const std::size_t M = g_.size();
    ComplexField out(M, 0.0);
    const double vol = std::pow(g_.length, g_.dim);
    for (std::size_t m = 0; m < mode_count(); ++m) {
        const cplx c = coeffs[m] * mult(mode(m)) / vol;
        if (c == 0.0) continue;
        const auto& w = waves_[m];
        for (std::size_t i = 0; i < M; ++i) out[i] += c * w[i];
    }
    return out;
}

ComplexField PhaseField::sigma0(std::size_t slice, std::span<const double> xi) const {
    return synthesize(sigma0_coeffs(slice, weights(xi)));
}

ComplexField PhaseField::sigma1(std::size_t slice, std::span<const double> xi) const {
    return synthesize(sigma1_coeffs(slice, weights(xi)));
}

PhaseField PhaseField::scaled(double a) const {
    PhaseField p = *this;
    p.opt_.amplitude *= a;
    for (auto* cs : {&p.coef_, &p.dcoef_})
        for (auto& sl : *cs)
            for (auto& v : sl) v *= a;
    for (auto* fs : {&p.A_, &p.dA_})
        for (auto& sl : *fs)
            for (auto& c : sl)
                for (auto& v : c) v *= a;
    return p;
}

PhaseField PhaseField::zero(const Grid& g, const std::vector<double>& times, PhaseOptions opt) {
    return PhaseField(g, PotentialSource::none(g), times, opt);
}

PhaseField build_sigma(const Grid& g, const PotentialSource& A, const std::vector<double>& times, PhaseOptions opt,
                       const CutoffPair& cut) {
    PhaseField p(g, A, times, opt, cut);
    if (p.wraps()) {
        std::ostringstream os;
        os << "ray support 1.75·2^{-2k} exceeds L/2 = " << g.length / 2 << " for bands";
        for (int k : p.bands())
            if (cut.transition_end() * std::pow(2.0, -2 * k) > g.length / 2) os << ' ' << k;
        os << "; rays wrap on the torus";
        warn("ray-wrap", os.str());
    }
    return p;
}

// ---------------------------------------------------------------- identities

PhaseIdentityResult phase_identity_residual(const PhaseField& phase, const std::vector<std::vector<double>>& xi) {
    const Grid& g = phase.grid();
    const int n = g.dim;
    const double kappa = phase.options().kappa;
    PhaseIdentityResult r;
    std::vector<PhaseIdentityResult> per(phase.slice_count() * xi.size());
    parallel_for(per.size(), [&](std::size_t q) {
        const std::size_t j = q / xi.size();
        const auto& x = xi[q % xi.size()];
        auto w = phase.weights(x);
        auto s0 = phase.sigma0_coeffs(j, w), s1 = phase.sigma1_coeffs(j, w);
        auto lap1 = phase.synthesize(s1, [](std::span<const double> e) { return cplx(-4 * kPi * kPi * dot(e, e)); });
        auto tr0 = phase.synthesize(s0, [&](std::span<const double> e) { return cplx(0, kTwoPi * dot(e, x)); });
        const auto& A = phase.potential(j);
        PhaseIdentityResult& o = per[q];
        for (std::size_t i = 0; i < g.size(); ++i) {
            double ax = 0;
            for (int a = 0; a < n; ++a) ax += A[a][i] * x[a];
            o.scale = std::max(o.scale, std::abs(ax));
            o.residual = std::max(o.residual, std::abs(lap1[i] + cplx(0, kTwoPi) * (kappa * tr0[i] + ax)));
        }
    });
    for (const auto& o : per) {
        r.residual = std::max(r.residual, o.residual);
        r.scale = std::max(r.scale, o.scale);
    }
    r.relative = r.residual / std::max(1.0, r.scale);
    return r;
}

double e1_identity_residual(const PhaseField& phase, const std::vector<std::vector<double>>& xi) {
    double diff = 0, scale = 0;
    for (std::size_t j = 0; j < phase.slice_count(); ++j)
        for (const auto& x : xi) {
            auto w = phase.weights(x);
            auto g1 = phase.synthesize(phase.sigma1_coeffs(j, w),
                                       [&](std::span<const double> e) { return cplx(0, kTwoPi * dot(e, x)); });
            auto e1 = phase.synthesize(phase.e1_coeffs(j, w));
            for (std::size_t i = 0; i < g1.size(); ++i) {
                diff = std::max(diff, std::abs(g1[i] - e1[i]));
                scale = std::max(scale, std::abs(g1[i]));
            }
        }
    return scale > 0 ? diff / scale : diff;
}

std::vector<std::vector<double>> xi_ring(int count, double r) {
    if (count < 1) throw InvalidArgument("ring needs at least one direction");
    std::vector<std::vector<double>> out;
    for (int j = 0; j < count; ++j) {
        double a = kTwoPi * j / count;
        out.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return out;
}

// ---------------------------------------------------------------- Λ

namespace {

struct Support {
    std::vector<std::array<int, 3>> index;
    std::vector<std::vector<double>> xi;
    std::vector<cplx> amp;  // Ω f̂ / L^n
};

Support annulus_support(const Grid& g, std::span<const cplx> f, const AnnulusCutoff& omega, const ParametrixOptions& opt,
                        std::size_t slices) {
    if (f.size() != g.size()) throw InvalidArgument("field size mismatch");
    if (omega.band() != 0) throw InvalidArgument("the parametrix is normalized to the band k_f = 0");
    auto spec = fourier_forward(g, f);
    const auto& T = lattice_tables(g);
    const int n = g.dim;
    double peak = 0, total = 0, outside = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        peak = std::max(peak, std::abs(omega(T.xi_norm[i]) * spec[i]));
        double m2 = std::norm(spec[i]);
        total += m2;
        if (T.xi_norm[i] < omega.flat_begin() || T.xi_norm[i] > omega.flat_end()) outside += m2;
    }
    if (total > 0 && std::sqrt(outside / total) > opt.flat_tolerance) {
        std::ostringstream os;
        os << "f has " << std::sqrt(outside / total) << " of its L2 norm outside {Omega = 1}";
        warn("omega-not-flat", os.str());
    }
    Support s;
    const double vol = std::pow(g.length, n);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        cplx a = omega(T.xi_norm[i]) * spec[i];
        if (peak == 0 || std::abs(a) <= opt.spectral_cut * peak) continue;
        s.index.push_back(g.unravel(i));
        s.xi.emplace_back(T.xi.begin() + i * n, T.xi.begin() + (i + 1) * n);
        s.amp.push_back(a / vol);
    }
    const double cost = static_cast<double>(g.size()) * s.xi.size() * slices;
    if (cost > opt.budget) {
        std::ostringstream os;
        os << "direct parametrix summation needs " << cost << " point evaluations (budget " << opt.budget << ")";
        throw BudgetExceeded(os.str());
    }
    return s;
}

// Σ_ξ amp · P(σ) · e^{-4π²it|ξ|²} e^{2πiξ·x} with P chosen by `phase_factor`.
template <class Body>
void sum_over_support(const PhaseField& phase, const Support& sup, Body&& body) {
    const Grid& g = phase.grid();
    const auto axis = axis_waves(g);
    std::vector<PhaseField::XiWeights> w(sup.xi.size());
    parallel_for(w.size(), [&](std::size_t q) { w[q] = phase.weights(sup.xi[q]); });
    parallel_for(phase.slice_count(), [&](std::size_t j) {
        ComplexField wave;
        const double t = phase.times()[j];
        for (std::size_t q = 0; q < sup.xi.size(); ++q) {
            plane_wave(g, axis, sup.index[q], wave);
            const cplx a = sup.amp[q] * std::polar(1.0, -4 * kPi * kPi * t * dot(sup.xi[q], sup.xi[q]));
            for (auto& v : wave) v *= a;
            body(j, q, w[q], wave);
        }
    });
}

}  // namespace

std::vector<SpaceTimeField> taylor_terms(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                         int order, const ParametrixOptions& opt) {
    if (order < 0) throw InvalidArgument("Taylor order must be >= 0");
    const Grid& g = phase.grid();
    auto sup = annulus_support(g, f, omega, opt, phase.slice_count() * (order + 1));
    std::vector<SpaceTimeField> out(order + 1, SpaceTimeField::zeros(g, phase.times()));
    sum_over_support(phase, sup, [&](std::size_t j, std::size_t, const PhaseField::XiWeights& w, const ComplexField& wave) {
        auto s0 = phase.sigma0_coeffs(j, w), s1 = phase.sigma1_coeffs(j, w);
        for (std::size_t m = 0; m < s0.size(); ++m) s0[m] += s1[m];
        auto sig = phase.synthesize(s0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            cplx p = wave[i];
            const cplx is = cplx(0, 1) * sig[i];
            for (int a = 0; a <= order; ++a) {
                out[a].slices[j][i] += p;
                p *= is / static_cast<double>(a + 1);
            }
        }
    });
    return out;
}

SpaceTimeField taylor_parametrix(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                 int order, const ParametrixOptions& opt) {
    auto terms = taylor_terms(f, phase, omega, order, opt);
    SpaceTimeField v = terms[0];
    for (std::size_t a = 1; a < terms.size(); ++a) v = sum(v, terms[a]);
    return v;
}

SpaceTimeField apply_parametrix(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                int order, const ParametrixOptions& opt) {
    if (order >= 0) return taylor_parametrix(f, phase, omega, order, opt);
    const Grid& g = phase.grid();
    auto sup = annulus_support(g, f, omega, opt, phase.slice_count());
    SpaceTimeField v = SpaceTimeField::zeros(g, phase.times());
    sum_over_support(phase, sup, [&](std::size_t j, std::size_t, const PhaseField::XiWeights& w, const ComplexField& wave) {
        auto s0 = phase.sigma0_coeffs(j, w), s1 = phase.sigma1_coeffs(j, w);
        for (std::size_t m = 0; m < s0.size(); ++m) s0[m] += s1[m];
        auto sig = phase.synthesize(s0);
        for (std::size_t i = 0; i < g.size(); ++i) v.slices[j][i] += std::exp(cplx(0, 1) * sig[i]) * wave[i];
    });
    return v;
}

double phase_size(const PhaseField& phase, std::span<const cplx> f, const AnnulusCutoff& omega) {
    ParametrixOptions opt;
    opt.budget = 1e300;
    auto sup = annulus_support(phase.grid(), f, omega, opt, 1);
    std::vector<double> best(sup.xi.size(), 0.0);
    parallel_for(sup.xi.size(), [&](std::size_t q) {
        auto w = phase.weights(sup.xi[q]);
        for (std::size_t j = 0; j < phase.slice_count(); ++j)
            for (auto v : phase.synthesize(phase.sigma0_coeffs(j, w))) best[q] = std::max(best[q], std::abs(v));
    });
    double m = 0;
    for (double b : best) m = std::max(m, b);
    return m;
}

PotentialSource phase_potential(const PhaseField& phase) {
    PotentialSource s;
    s.grid = phase.grid();
    s.zero = phase.mode_count() == 0;
    auto times = phase.times();
    std::vector<std::vector<RealField>> values;
    for (std::size_t j = 0; j < phase.slice_count(); ++j) values.push_back(phase.potential(j));
    s.at = [times, values](double t) {
        for (std::size_t j = 0; j < times.size(); ++j)
            if (std::abs(times[j] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return values[j];
        throw InvalidArgument("phase potential is only defined at the phase times");
    };
    return s;
}

ParametrixResidual parametrix_residual(std::span<const cplx> f, const PhaseField& phase, const AnnulusCutoff& omega,
                                       const ParametrixOptions& opt) {
    const Grid& g = phase.grid();
    const int n = g.dim;
    const std::size_t M = g.size(), S = phase.slice_count();
    if (S < 3) throw InvalidArgument("parametrix residual needs at least three slices");
    ParametrixResidual out;
    auto v = apply_parametrix(f, phase, omega, -1, opt);
    out.numeric = equation_residual(v, phase_potential(phase), ForcingSource::none(), false);

    const double kappa = phase.options().kappa;
    const char* names[] = {"i_dt_sigma", "lap_sigma0", "transport_sigma0", "grad_sigma1_xi", "quadratic"};
    std::vector<SpaceTimeField> terms(5, SpaceTimeField::zeros(g, phase.times()));
    auto sup = annulus_support(g, f, omega, opt, S * 6);
    sum_over_support(phase, sup, [&](std::size_t j, std::size_t, const PhaseField::XiWeights& w, const ComplexField& wave) {
        const auto& xi = w.xi;
        auto s0 = phase.sigma0_coeffs(j, w), s1 = phase.sigma1_coeffs(j, w);
        auto d0 = phase.sigma0_coeffs(j, w, true), d1 = phase.sigma1_coeffs(j, w, true);
        std::vector<cplx> s(s0.size()), d(s0.size());
        for (std::size_t m = 0; m < s.size(); ++m) {
            s[m] = s0[m] + s1[m];
            d[m] = cplx(0, 1) * (d0[m] + d1[m]);
        }
        auto sig = phase.synthesize(s);
        std::vector<ComplexField> field(5);
        field[0] = phase.synthesize(d);
        field[1] = phase.synthesize(s0, [](std::span<const double> e) { return cplx(-4 * kPi * kPi * dot(e, e)); });
        const double tw = 4 * kPi - kTwoPi * kappa;
        field[2] = phase.synthesize(s0, [&](std::span<const double> e) { return cplx(0, tw) * cplx(0, kTwoPi * dot(e, xi)); });
        field[3] = phase.synthesize(s1, [&](std::span<const double> e) { return cplx(0, 4 * kPi) * cplx(0, kTwoPi * dot(e, xi)); });
        field[4].assign(M, 0.0);
        const auto& A = phase.potential(j);
        for (int a = 0; a < n; ++a) {
            auto ga = phase.synthesize(s, [&](std::span<const double> e) { return cplx(0, kTwoPi * e[a]); });
            for (std::size_t i = 0; i < M; ++i) field[4][i] += cplx(0, 1) * (ga[i] * ga[i] + A[a][i] * ga[i]);
        }
        for (std::size_t i = 0; i < M; ++i) {
            const cplx e = std::exp(cplx(0, 1) * sig[i]) * wave[i];
            for (int t = 0; t < 5; ++t) terms[t].slices[j][i] += field[t][i] * e;
        }
    });
    out.analytic = SpaceTimeField::zeros(g, phase.times());
    for (int t = 0; t < 5; ++t) {
        out.term_norms[names[t]] = l1l2(terms[t]);
        out.analytic = sum(out.analytic, terms[t]);
    }
    out.numeric_norm = l1l2(out.numeric);
    out.analytic_norm = l1l2(out.analytic);
    const double d = l1l2(difference(out.numeric, out.analytic));
    out.agreement = out.analytic_norm > 0 ? d / out.analytic_norm : d;
    if (opt.abort_on_disagreement && out.agreement > 1e-3) {
        std::ostringstream os;
        os << "dual-path residual disagreement " << out.agreement << " (numeric " << out.numeric_norm << ", analytic "
           << out.analytic_norm << ")";
        throw NumericalFailure(os.str());
    }
    return out;
}

ComplexField spectral_bump_packet(const Grid& g, std::span<const double> center, double radius) {
    if (static_cast<int>(center.size()) != g.dim) throw InvalidArgument("center has the wrong dimension");
    if (!(radius > 0)) throw InvalidArgument("radius must be positive");
    const auto& T = lattice_tables(g);
    ComplexField spec(g.size(), 0.0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double d2 = 0;
        for (int a = 0; a < g.dim; ++a) d2 += std::pow(T.xi[i * g.dim + a] - center[a], 2);
        const double r2 = d2 / (radius * radius);
        if (r2 < 1) spec[i] = std::exp(1 - 1 / (1 - r2));
    }
    auto f = fourier_inverse(g, spec);
    const double nf = l2_norm(g, f);
    if (nf == 0) throw InvalidArgument("bump contains no lattice frequency");
    for (auto& v : f) v /= nf;
    return f;
}

BesovErrorBound besov_error_bound(const SpaceTimeField& u, const PotentialSource& A, double s, double eps,
                                  const CutoffPair& cut) {
    const Grid& g = u.grid;
    if (!(eps > 0)) throw InvalidArgument("eps must be positive");
    BesovErrorBound out;
    const auto range = lattice_band_range(g, cut);
    std::vector<std::vector<RealField>> As(u.slice_count());
    for (std::size_t j = 0; j < As.size(); ++j) As[j] = A.at(u.times[j]);
    for (int k = range.k_min; k <= range.k_max; ++k) {
        std::vector<double> en(u.slice_count());
        double un = 0;
        for (std::size_t j = 0; j < u.slice_count(); ++j) {
            en[j] = l2_norm(g, error_term_slice(g, As[j], u.slices[j], k, cut).direct);
            un = std::max(un, l2_norm(g, band_piece(g, u.slices[j], k, cut)));
        }
        const double e = time_norm(en, u.times, 1.0), w = std::pow(2.0, 2 * k * s);
        out.bands.push_back(k);
        out.error_norms.push_back(e);
        out.lhs += w * e * e;
        out.rhs += w * un * un;
    }
    out.constant = out.rhs > 0 ? out.lhs / (eps * eps * out.rhs) : 0;
    return out;
}

}  // namespace magschro
