#include "magschro/diagnostics.hpp"
#include "magschro/fourier.hpp"
#include "magschro/littlewood_paley.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace magschro;

namespace {

// Field with spectrum profile(ξ) (FFT order), inverse transformed.
template <class F>
ComplexField from_spectrum(const Grid& g, F profile) {
    const auto& t = lattice_tables(g);
    ComplexField s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = profile(std::span<const double>(&t.xi[i * g.dim], g.dim), t.xi_norm[i]);
    return fourier_inverse(g, s);
}

double bump(double x) { return smooth_step(1 - std::abs(x)) * (std::abs(x) < 1 ? 1.0 : 0.0); }
double radial_window(double r, double a, double b) {
    double w = 0.25 * (b - a);
    return smooth_step((r - a) / w) * smooth_step((b - r) / w);
}

}  // namespace

TEST_CASE("cutoff pair values from the definition") {
    auto c = build_cutoffs(0.125);
    CHECK(c.chi(0.5) == 1.0);
    CHECK(c.chi(1.0) == 1.0);
    CHECK(c.chi(2.0) == 0.0);
    CHECK(c.phi(3.0) == 0.0);
    CHECK(c.phi(0.4) == 0.0);
    double s = 0;
    for (int k = -10; k <= 10; ++k) s += c.phi(std::ldexp(1.3, -k));
    CHECK(std::abs(s - 1.0) < 1e-12);
    CHECK_THROWS_AS(build_cutoffs(0.3), InvalidArgument);
}

TEST_CASE("partition of unity on random radii") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-8, 8);
    for (double glue : {0.05, 0.125, 0.25}) {
        CutoffPair c(glue);
        double worst = 0;
        for (int i = 0; i < 2000; ++i) {
            double r = std::exp2(u(rng));
            double s = 0;
            for (int k = -12; k <= 12; ++k) s += c.phi(std::ldexp(r, -k));
            worst = std::max(worst, std::abs(s - 1));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("cutoff derivatives agree with finite differences and stay bounded") {
    CutoffPair c;
    double h = 1e-5, m1 = 0, m2 = 0;
    for (double r = 1.0; r <= 2.0; r += 0.01) {
        double fd1 = (c.chi(r + h) - c.chi(r - h)) / (2 * h);
        double fd2 = (c.chi_d1(r + h) - c.chi_d1(r - h)) / (2 * h);
        CHECK(std::abs(fd1 - c.chi_d1(r)) < 1e-6);
        CHECK(std::abs(fd2 - c.chi_d2(r)) < 1e-4);
        m1 = std::max(m1, std::abs(c.chi_d1(r)));
        m2 = std::max(m2, std::abs(c.chi_d2(r)));
        CHECK(c.chi(r) >= 0.0);
        CHECK(c.chi(r) <= 1.0);
    }
    CHECK(m1 < 10);
    CHECK(m2 < 100);
}

TEST_CASE("band ranges") {
    auto g = make_grid(2, 128, 32, 0.1, 1);
    auto R = representable_band_range(g);
    CHECK(R.k_min == -3);
    CHECK(R.k_max == -1);
    auto L = lattice_band_range(g);
    CHECK(L.k_min <= -5);
    CHECK(L.k_max >= 1);
    auto f = oracle::random_field(g.size(), 1);
    CHECK_THROWS_AS(project_band(g, f, 0), InvalidArgument);
    CHECK_THROWS_AS(project_band(g, f, -4), InvalidArgument);
}

TEST_CASE("projection algebra") {
    auto g = make_grid(2, 128, 32, 0.1, 1);
    auto f = oracle::random_field(g.size(), 5);
    auto R = representable_band_range(g);
    for (int k = R.k_min; k <= R.k_max; ++k) {
        auto pk = project_band(g, f, k);
        auto fat = project_fat(g, pk, k);
        CHECK(oracle::max_rel_error(fat, pk) < 1e-12);
        for (int j = R.k_min; j <= R.k_max; ++j) {
            if (std::abs(j - k) < 2) continue;
            auto pjk = project_band(g, pk, j);
            double m = 0;
            for (auto z : pjk) m = std::max(m, std::abs(z));
            CHECK(m < 1e-14);
        }
        auto a = spectral_derivative(g, pk, 0);
        auto b = project_band(g, spectral_derivative(g, f, 0), k);
        CHECK(oracle::max_rel_error(a, b) < 1e-12);
    }
}

TEST_CASE("single-band data is fixed by its projection") {
    auto g = make_grid(2, 128, 32, 0.1, 1);
    int k = -2;
    // φ(2^{-k}r) = 1 for 2^{k}(7/8) <= r <= 2^k (5/4)
    auto f = from_spectrum(g, [&](std::span<const double>, double r) {
        return cplx(radial_window(r, std::ldexp(0.875, k), std::ldexp(1.25, k)), 0.0);
    });
    CHECK(oracle::max_rel_error(project_band(g, f, k), f) < 1e-12);
}

TEST_CASE("band reconstruction") {
    auto g = make_grid(2, 128, 32, 0.1, 1);
    double c[2] = {1.0, -2.0}, p[2] = {0.25, 0.125};
    auto f = gaussian_wavepacket(g, c, 2.0, p);
    for (auto R : {representable_band_range(g), lattice_band_range(g)}) {
        auto d = decompose(g, f, R);
        CHECK(oracle::max_rel_error(d.reconstruct(), f) < 1e-10);
    }
    // mean-zero band-limited data: the lattice bands alone reproduce f
    auto h = from_spectrum(g, [&](std::span<const double> xi, double r) {
        return r == 0 ? cplx{} : cplx(std::exp(-8 * r * r) * (1 + xi[0]), 0.0);
    });
    auto d = decompose(g, h, lattice_band_range(g));
    ComplexField s(g.size());
    for (const auto& piece : d.pieces)
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += piece[i];
    CHECK(oracle::max_rel_error(s, h) < 1e-10);
}

TEST_CASE("paraproduct groups sum to P_k(fg)") {
    auto g = make_grid(2, 128, 32, 0.1, 1);
    double c1[2] = {0, 0}, c2[2] = {2, -1}, p1[2] = {0.0625, 0}, p2[2] = {0.25, 0.1875};
    auto f = gaussian_wavepacket(g, c1, 3.0, p1);
    auto h = gaussian_wavepacket(g, c2, 2.0, p2);
    for (int k = -3; k <= 1; ++k) {
        auto P = paraproduct_split(g, f, h, k);
        CHECK(oracle::max_rel_error(P.group_sum(), P.direct) < 1e-10);
        MESSAGE("k=" << k << " |low_high|=" << l2_norm(g, P.low_high) << " |comm|=" << l2_norm(g, P.commutator)
                     << " |high_low|=" << l2_norm(g, P.high_low) << " |high_high|=" << l2_norm(g, P.high_high));
    }
}

TEST_CASE("low-band f against single-band g leaves only the low-high groups") {
    auto g = make_grid(2, 128, 32, 0.1, 1);
    int k = -1;
    // f spectrum inside {χ(2^{-(k-4)}·) = 1}, g inside the flat part of φ_k
    auto f = from_spectrum(g, [&](std::span<const double>, double r) {
        return cplx(r <= std::ldexp(1.2, k - 4) ? 1.0 : 0.0, 0.0);
    });
    auto h = from_spectrum(g, [&](std::span<const double>, double r) {
        return cplx(radial_window(r, std::ldexp(0.875, k), std::ldexp(1.25, k)), 0.0);
    });
    auto P = paraproduct_split(g, f, h, k);
    double scale = l2_norm(g, P.direct);
    CHECK(l2_norm(g, P.high_low) < 1e-13 * scale);
    CHECK(l2_norm(g, P.high_high) < 1e-13 * scale);
    CHECK(l2_norm(g, P.low_high) > 0.1 * scale);
}

TEST_CASE("Bernstein ratio") {
    auto g = make_grid(2, 128, 16, 0.1, 1);
    double ratios[3];
    int idx = 0;
    for (double shift : {0.0, 0.5, 1.25}) {
        FrequencyBox Q{{1.0 + shift, -0.5}, {0.5, 0.5}};
        auto f = from_spectrum(g, [&](std::span<const double> xi, double) {
            return cplx(bump((xi[0] - Q.center[0]) / 0.5) * bump((xi[1] - Q.center[1]) / 0.5), 0.0);
        });
        CHECK(bernstein_ratio(g, f, Q, 2.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
        ratios[idx++] = bernstein_ratio(g, f, Q, 2.0, INFINITY);
        FrequencyBox tight{Q.center, {0.2, 0.2}};
        CHECK_THROWS_AS(bernstein_ratio(g, f, tight, 2.0, INFINITY), InvalidArgument);
    }
    for (double r : ratios) {
        CHECK(r <= 1.0);  // ‖f‖_∞ <= ‖f̂‖_1 <= |Q|^{1/2}‖f‖_2
        CHECK(std::abs(r / ratios[0] - 1) < 0.1);
    }
}

TEST_CASE("mixed Bernstein ratio is scale invariant across bands") {
    auto g = make_grid(2, 2048, 64, 0.1, 1);
    double lo = 1e300, hi = 0;
    for (int k = -3; k <= 3; ++k) {
        auto f = from_spectrum(g, [&](std::span<const double>, double r) {
            return cplx(radial_window(r, std::ldexp(0.75, k), std::ldexp(1.5, k)), 0.0);
        });
        double q = mixed_bernstein_ratio(g, f, k, INFINITY, 2.0, 2.0);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    CHECK(hi / lo < 1.1);
}

TEST_CASE("Besov sums") {
    auto g = make_grid(2, 128, 32, 0.05, 0.5);
    auto Linf2 = [&](const SpaceTimeField& u) {
        double m = 0;
        for (const auto& s : u.slices) m = std::max(m, l2_norm(g, s));
        return m;
    };
    int k0 = -2;
    auto f = from_spectrum(g, [&](std::span<const double>, double r) {
        return cplx(radial_window(r, std::ldexp(0.875, k0), std::ldexp(1.25, k0)), 0.0);
    });
    auto u = free_evolution(g, f, {0.0, 0.25, 0.5});
    for (double s : {0.0, 1.0}) {
        auto b = besov_l2_norm(u, s, Linf2);
        CHECK(b.value == doctest::Approx(std::pow(2.0, k0 * s) * Linf2(u)).epsilon(1e-12));
    }

    double c[2] = {0, 0}, p[2] = {0.25, 0};
    auto packet = gaussian_wavepacket(g, c, 4.0, p);
    auto v = free_evolution(g, packet, {0.0, 0.5});
    auto full = lattice_band_range(g);
    auto b0 = besov_l2_norm(v, 0.0, Linf2, full);
    CHECK(Linf2(v) <= std::sqrt(2.0) * b0.value * (1 + 1e-12));
    auto b1 = besov_l2_norm(v, 1.0, Linf2, full);
    double grad = 0;
    for (const auto& s : v.slices) {
        double acc = 0;
        for (int d = 0; d < 2; ++d) acc += std::pow(l2_norm(g, spectral_derivative(g, s, d)), 2);
        grad = std::max(grad, std::sqrt(acc));
    }
    double ratio = grad / b1.value;  // |∇| ~ 2π·2^k on band k
    CHECK(ratio > kTwoPi / 4);
    CHECK(ratio < kTwoPi * 4);

    WarningCapture cap;
    besov_l2_norm(v, 0.0, Linf2);
    CHECK(cap.contains("besov-residual"));
}

TEST_CASE("sequence lemma") {
    std::vector<double> zero(32, 0.0), one(32, 1.0), geo(32);
    for (int i = 0; i < 32; ++i) geo[i] = std::pow(2.0, -std::abs(i - 16));
    CHECK(sequence_bound_check(zero, geo, 0.125, -16).lhs == 0.0);
    auto r = sequence_bound_check(one, geo, 0.125, -16);
    CHECK(std::isfinite(r.lhs));
    CHECK(r.ratio <= r.schur_bound);

    for (double h : {0.125, 0.1875}) {
        std::mt19937_64 rng(99);
        std::bernoulli_distribution coin(0.5);
        std::uniform_real_distribution<double> mag(0, 1);
        double first = 0, worst = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> a(32), b(32);
            for (int i = 0; i < 32; ++i) {
                a[i] = coin(rng) ? 1.0 : -1.0;
                b[i] = mag(rng);
            }
            auto s = sequence_bound_check(a, b, h, -16);
            CHECK(s.ratio <= s.schur_bound);
            worst = std::max(worst, s.ratio);
            if (trial == 499) first = worst;
        }
        CHECK(worst / first < 1.5);
    }
}
