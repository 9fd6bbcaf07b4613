#include "doctest.h"
#include "oracles.hpp"

#include "magschro/diagnostics.hpp"
#include "magschro/fourier.hpp"
#include "magschro/mixed_norms.hpp"
#include "magschro/parametrix.hpp"
#include "magschro/stats.hpp"

#include <cmath>

using namespace magschro;

namespace {

Grid box16(double T) { return make_grid(2, 64, 16, 1.0 / 64, T); }

PresetParams low_band() {
    PresetParams p;
    p.kind = PresetKind::low_band;
    p.eps = 1.0;
    p.width = 2;
    p.cap = -3;
    p.velocity = {0.3, -0.2, 0};
    return p;
}

ComplexField packet(const Grid& g) { return spectral_bump_packet(g, std::vector<double>{1.1, 0.1}, 0.3); }

double gl_integral(const std::function<double(double)>& f, double a, double b, int panels = 64) {
    const auto& r = gauss_legendre(20);
    double h = (b - a) / panels, s = 0;
    for (int p = 0; p < panels; ++p)
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            s += 0.5 * h * r.weights[i] * f(a + h * (p + 0.5 + 0.5 * r.nodes[i]));
    return s;
}

double field_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
    double e = 0;
    for (std::size_t s = 0; s < a.slices.size(); ++s) e = std::max(e, oracle::max_rel_error(a.slices[s], b.slices[s]));
    return e;
}

}  // namespace

TEST_CASE("ray weights satisfy the integration by parts relations") {
    const auto& cut = default_cutoffs();
    for (double c : {0.25, 1.0, 4.0})
        for (double s : {-0.7, 0.05, 0.3, 1.9}) {
            cplx w0 = ray_weight(RayProfile::chi, c, s), w1 = ray_weight(RayProfile::chi_d1, c, s),
                 w2 = ray_weight(RayProfile::chi_d2, c, s);
            cplx two_pi_i(0, kTwoPi);
            // ∫ e^{2πizs}χ(cz) dz: boundary term -χ(0) = -1
            CHECK(std::abs(two_pi_i * s * w0 + 1.0 + c * w1) < 1e-11 * (1 + std::abs(w0)));
            // χ'(0) = 0
            CHECK(std::abs(two_pi_i * s * w1 + c * w2) < 1e-11 * (1 + std::abs(w1)));
        }
    double direct = gl_integral([&](double z) { return cut.chi(z); }, 0, 1.75);
    CHECK(std::abs(ray_weight(RayProfile::chi, 1.0, 0.0) - direct) < 1e-12);
    CHECK(std::abs(ray_weight(RayProfile::chi, 4.0, 0.0) - direct / 4) < 1e-12);
}

TEST_CASE("ray transform of a Gaussian against the analytic line integral") {
    auto g = box16(1);
    const double w = 1.5;
    const auto& T = lattice_tables(g);
    ComplexField f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r2 = T.x[2 * i] * T.x[2 * i] + T.x[2 * i + 1] * T.x[2 * i + 1];
        f[i] = std::exp(-kPi * r2 / (w * w));
    }
    std::vector<double> th{std::cos(0.7), std::sin(0.7)};
    const auto& cut = default_cutoffs();
    auto R = ray_transform(g, f, th, 1.0, RayProfile::chi);
    auto Q = ray_transform_quadrature(g, f, th, 1.0, RayProfile::chi, 0.125);
    double err = 0, qerr = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = T.x[2 * i], y = T.x[2 * i + 1];
        if (x * x + y * y > 9) continue;
        double exact = gl_integral(
            [&](double z) {
                double a = x + z * th[0], b = y + z * th[1];
                return std::exp(-kPi * (a * a + b * b) / (w * w)) * cut.chi(z);
            },
            0, 1.75);
        err = std::max(err, std::abs(R[i] - exact));
        qerr = std::max(qerr, std::abs(Q[i] - R[i]));
    }
    CHECK(err < 1e-6);
    CHECK(qerr < 1e-8);
}

TEST_CASE("phase vanishes for zero potential and rejects unsuitable potentials") {
    auto g = box16(0.25);
    auto times = uniform_times(0.25, 1.0 / 64);
    auto ph = build_sigma(g, PotentialSource::none(g), times);
    CHECK(ph.mode_count() == 0);
    auto s0 = ph.sigma0(0, std::vector<double>{1, 0});
    double mx = 0;
    for (auto v : s0) mx = std::max(mx, std::abs(v));
    CHECK(mx == 0.0);

    CHECK_THROWS_AS(build_sigma(g, PotentialSource::constant(g, {0.1, 0, 0}), times), InvalidArgument);
    PresetParams b;
    b.width = 3;
    CHECK_THROWS_AS(build_sigma(g, PotentialSource::preset(g, b), times), InvalidArgument);
}

TEST_CASE("phase symmetries, identity and e1 form") {
    auto g = box16(0.25);
    auto times = uniform_times(0.25, 1.0 / 64);
    WarningCapture wc;
    auto ph = build_sigma(g, PotentialSource::preset(g, low_band()), times);
    CHECK(wc.contains("ray-wrap"));
    CHECK(ph.mode_count() > 0);
    CHECK(ph.bands() == std::vector<int>{-4, -3});

    std::vector<double> xi{0.8, 0.5}, xi2{1.6, 1.0};
    for (std::size_t s : {std::size_t(0), ph.slice_count() - 1}) {
        auto a = ph.sigma0(s, xi), b = ph.sigma0(s, xi2);
        auto c = ph.sigma1(s, xi), d = ph.sigma1(s, xi2);
        double m0 = 0, m1 = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            m0 = std::max(m0, std::abs(a[i]));
            m1 = std::max(m1, std::abs(c[i]));
        }
        REQUIRE(m0 > 0);
        REQUIRE(m1 > 0);
        double im0 = 0, re1 = 0, hom0 = 0, hom1 = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            im0 = std::max(im0, std::abs(a[i].imag()));
            re1 = std::max(re1, std::abs(c[i].real()));
            hom0 = std::max(hom0, std::abs(a[i] - b[i]));
            hom1 = std::max(hom1, std::abs(2.0 * c[i] - d[i]));
        }
        CHECK(im0 < 1e-12 * m0);
        CHECK(re1 < 1e-12 * m1);
        CHECK(hom0 < 1e-12 * m0);
        CHECK(hom1 < 1e-12 * m1);
    }

    auto pid = phase_identity_residual(ph, xi_ring(16, 1.0));
    CHECK(pid.scale > 0);
    CHECK(pid.relative < 1e-6);
    auto pid2 = phase_identity_residual(build_sigma(g, PotentialSource::preset(g, low_band()), times, {2.0, 1.0}),
                                        xi_ring(16, 1.0));
    CHECK(pid2.relative < 1e-6);
    CHECK(e1_identity_residual(ph, xi_ring(4, 1.0)) < 1e-6);

    auto half = ph.scaled(0.5);
    auto p = ph.sigma0(1, xi), q = half.sigma0(1, xi);
    for (std::size_t i = 0; i < p.size(); i += 97) CHECK(std::abs(0.5 * p[i] - q[i]) < 1e-14 + 1e-12 * std::abs(p[i]));
}

TEST_CASE("parametrix with zero phase is the free evolution") {
    auto g = box16(0.25);
    auto times = uniform_times(0.25, 1.0 / 16);
    auto f = packet(g);
    AnnulusCutoff om(0);
    auto v = apply_parametrix(f, PhaseField::zero(g, times), om);
    for (std::size_t s = 0; s < times.size(); ++s)
        CHECK(oracle::max_rel_error(v.slices[s], free_propagate(g, f, times[s])) < 1e-12);

    auto ph = build_sigma(g, PotentialSource::preset(g, low_band()), times);
    auto t0 = taylor_parametrix(f, ph, om, 0);
    CHECK(field_diff(t0, v) < 1e-12);

    ParametrixOptions tight;
    tight.budget = 10;
    CHECK_THROWS_AS(apply_parametrix(f, ph, om, -1, tight), BudgetExceeded);

    WarningCapture wc;
    auto rough = oracle::random_field(g.size(), 5);
    apply_parametrix(rough, PhaseField::zero(g, times), om);
    CHECK(wc.contains("omega-not-flat"));
}

TEST_CASE("Taylor expansion of the parametrix converges") {
    auto g = box16(0.25);
    auto times = uniform_times(0.25, 1.0 / 16);
    auto f = packet(g);
    AnnulusCutoff om(0);
    auto base = build_sigma(g, PotentialSource::preset(g, low_band()), times);
    auto ph = base.scaled(0.3 / phase_size(base, f, om));
    auto v = apply_parametrix(f, ph, om);
    double prev = 1e300;
    for (int order = 0; order <= 4; ++order) {
        double e = field_diff(taylor_parametrix(f, ph, om, order), v);
        MESSAGE("order " << order << " error " << e);
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < 1e-4);
    auto terms = taylor_terms(f, ph, om, 3);
    REQUIRE(terms.size() == 4);
    auto acc = terms[0];
    for (std::size_t a = 1; a < terms.size(); ++a) acc = sum(acc, terms[a]);
    CHECK(field_diff(acc, taylor_parametrix(f, ph, om, 3)) < 1e-12);
}

TEST_CASE("parametrix residual: two paths agree and scale linearly in eps") {
    auto g = box16(0.25);
    auto times = uniform_times(0.25, 1.0 / 64);
    auto f = packet(g);
    AnnulusCutoff om(0);
    auto base = build_sigma(g, PotentialSource::preset(g, low_band()), times, {2.0, 1.0});
    double size = phase_size(base, f, om);
    REQUIRE(size > 0);

    std::vector<double> eps{0.02, 0.05, 0.1, 0.2}, res;
    for (double e : eps) {
        auto r = parametrix_residual(f, base.scaled(e / size), om);
        MESSAGE("eps " << e << " numeric " << r.numeric_norm << " analytic " << r.analytic_norm << " agreement "
                       << r.agreement);
        CHECK(r.agreement < 1e-4);
        CHECK(r.term_norms.count("quadratic") == 1);
        res.push_back(r.numeric_norm);
    }
    auto fit = linear_fit(eps, res);
    CHECK(fit.r2 >= 0.9);
    CHECK(fit.slope > 0);

    auto zero = parametrix_residual(f, PhaseField::zero(g, times, {2.0, 1.0}), om);
    CHECK(zero.numeric_norm < 1e-6);
}

TEST_CASE("Besov error bound constant is stable in eps") {
    auto g = make_grid(2, 64, 32, 1.0 / 64, 0.5);
    auto times = uniform_times(0.5, 1.0 / 16);
    auto f = oracle::random_field(g.size(), 3);
    f = apply_multiplier(g, f, [&] {
        std::vector<double> m(g.size());
        const auto& T = lattice_tables(g);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-T.xi_norm[i] * T.xi_norm[i] * 16);
        return m;
    }());
    PresetParams p;
    p.width = 3;
    p.direction = {1, 0.5, 0};
    for (double s : {0.0, 1.0}) {
        std::vector<double> K;
        for (double eps : {0.05, 0.1, 0.2}) {
            p.eps = eps;
            auto A = PotentialSource::preset(g, p);
            auto u = solve(g, f, A, ForcingSource::none(), times);
            auto b = besov_error_bound(u, A, s, eps);
            CHECK(b.lhs > 0);
            CHECK(b.bands.size() == b.error_norms.size());
            K.push_back(b.constant);
        }
        double lo = *std::min_element(K.begin(), K.end()), hi = *std::max_element(K.begin(), K.end());
        MESSAGE("s " << s << " K " << K[0] << " " << K[1] << " " << K[2]);
        CHECK(hi <= 2 * lo);
    }
}
