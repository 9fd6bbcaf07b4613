#include "magschro/diagnostics.hpp"
#include "magschro/fourier.hpp"
#include "magschro/snapshot.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace magschro;

TEST_CASE("make_grid arithmetic and validation") {
    auto g = make_grid(2, 64, 32, 0.01, 1);
    CHECK(g.dx() == doctest::Approx(0.5));
    CHECK(g.frequency_spacing() == doctest::Approx(1.0 / 32));
    CHECK(g.time_steps() == 100);

    auto g1 = make_grid(1, 8, 8, 0.1, 1);
    auto f = g1.physical_frequencies();
    CHECK(f.front() == doctest::Approx(-0.5));
    CHECK(f[1] == doctest::Approx(-0.375));
    CHECK(f.back() == doctest::Approx(0.375));

    CHECK(make_grid(3, 16, 16, 0.05, 0.5).size() == 4096);
    CHECK_THROWS_AS(make_grid(2, 48, 32, 0.01, 1), InvalidArgument);
    CHECK_THROWS_AS(make_grid(2, 64, 32, 2.0, 1), InvalidArgument);
    CHECK_THROWS_AS(make_grid(4, 8, 1, 0.1, 1), InvalidArgument);
}

TEST_CASE("round trip and Parseval on every dimension") {
    for (int n = 1; n <= 3; ++n) {
        int N = n == 3 ? 16 : (n == 2 ? 64 : 256);
        auto g = make_grid(n, N, 12.5, 0.1, 1);
        auto f = oracle::random_field(g.size(), 7 + n);
        auto spec = fourier_forward(g, f);
        auto back = fourier_inverse(g, spec);
        CHECK(oracle::max_rel_error(back, f) < 1e-12);
        double a = l2_norm(g, f), b = spectrum_l2_norm(g, spec);
        CHECK(std::abs(a - b) / a < 1e-12);
    }
}

TEST_CASE("single-site spike has flat spectrum modulus") {
    auto g = make_grid(2, 32, 8, 0.1, 1);
    ComplexField f(g.size());
    f[g.ravel({5, 11, 0})] = 1.0;
    auto spec = fourier_forward(g, f);
    for (auto z : spec) CHECK(std::abs(z) == doctest::Approx(g.cell_volume()).epsilon(1e-13));
}

TEST_CASE("Gaussian Fourier pair") {
    auto g = make_grid(2, 128, 32, 0.1, 1);
    const double w = 2.0, x0[2] = {1.5, -2.0};
    const auto& t = lattice_tables(g);
    ComplexField f(g.size()), expect(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double r2 = 0, ph = 0, xi2 = 0;
        for (int d = 0; d < 2; ++d) {
            double y = t.x[2 * i + d] - x0[d];
            r2 += y * y;
            xi2 += t.xi[2 * i + d] * t.xi[2 * i + d];
            ph += x0[d] * t.xi[2 * i + d];
        }
        f[i] = std::exp(-kPi * r2 / (w * w));
        expect[i] = w * w * std::exp(-kPi * w * w * xi2) * std::polar(1.0, -kTwoPi * ph);
    }
    CHECK(oracle::max_rel_error(fourier_forward(g, f), expect) < 1e-8);
}

TEST_CASE("free propagator: identity, unitarity, group law") {
    auto g = make_grid(2, 64, 32, 0.1, 1);
    double c[2] = {0, 0}, p[2] = {0.25, -0.125};
    auto f = gaussian_wavepacket(g, c, 3.0, p);
    CHECK(oracle::max_rel_error(free_propagate(g, f, 0.0), f) == 0.0);
    auto a = free_propagate(g, free_propagate(g, f, 0.3), 0.45);
    auto b = free_propagate(g, f, 0.75);
    CHECK(oracle::max_rel_error(a, b) < 1e-12);
    CHECK(std::abs(l2_norm(g, b) - 1.0) < 1e-12);
}

TEST_CASE("free Gaussian matches the closed form") {
    struct Case { int n, N; double L, w; };
    for (auto cs : {Case{1, 256, 32, 3.5}, Case{2, 128, 32, 3.5}}) {
        auto g = make_grid(cs.n, cs.N, cs.L, 0.1, 1);
        std::vector<double> x0(cs.n, 0.5), p(cs.n, 0.0);
        p[0] = 8.0 / cs.L;
        const auto& t = lattice_tables(g);
        ComplexField f(g.size()), expect(g.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::span<const double> x(&t.x[i * cs.n], cs.n);
            f[i] = oracle::free_gaussian(x, 0.0, cs.w, p, x0);
            expect[i] = oracle::free_gaussian(x, 1.0, cs.w, p, x0);
        }
        auto u = free_propagate(g, f, 1.0);
        CHECK(oracle::max_rel_error(u, expect) < 1e-6);
    }
}

TEST_CASE("sup-norm decay t^{-n/2} over [1, 8]") {
    auto g = make_grid(2, 512, 128, 0.1, 1);
    double c[2] = {0, 0}, p[2] = {0, 0};
    auto f = gaussian_wavepacket(g, c, 2.0, p);
    double lo = 1e300, hi = 0;
    for (double t : {1.0, 2.0, 4.0, 8.0}) {
        auto u = free_propagate(g, f, t);
        double m = 0;
        for (auto z : u) m = std::max(m, std::abs(z));
        lo = std::min(lo, m * t);
        hi = std::max(hi, m * t);
    }
    CHECK(hi / lo < 1.1);
}

TEST_CASE("wave packets") {
    auto g = make_grid(2, 64, 32, 0.1, 1);
    double c1[2] = {-8, 0}, c2[2] = {8, 0}, zero[2] = {0, 0}, p[2] = {0.25, 0.0};
    auto f0 = gaussian_wavepacket(g, c1, 2.0, zero);
    for (auto z : f0) {
        CHECK(z.imag() == 0.0);
        CHECK(z.real() > 0.0);
    }
    auto a = gaussian_wavepacket(g, c1, 2.0, p), b = gaussian_wavepacket(g, c2, 2.0, p);
    ComplexField s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + b[i];
    CHECK(std::abs(l2_norm(g, s) - std::sqrt(2.0)) < 1e-10);

    auto spec = fourier_forward(g, a);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (std::abs(spec[i]) > std::abs(spec[arg])) arg = i;
    const auto& t = lattice_tables(g);
    CHECK(t.xi[2 * arg] == doctest::Approx(0.25));
    CHECK(t.xi[2 * arg + 1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(gaussian_wavepacket(g, c1, 1.0, p), InvalidArgument);
}

TEST_CASE("Nyquist leakage warning") {
    auto g = make_grid(1, 32, 8, 0.1, 1);
    ComplexField f(g.size());
    for (int i = 0; i < 32; ++i) f[i] = (i % 2) ? 1.0 : -1.0;
    WarningCapture cap;
    free_propagate(g, f, 0.1);
    CHECK(cap.contains("nyquist-leakage"));
}

TEST_CASE("snapshot round trip") {
    auto g = make_grid(2, 16, 4, 0.1, 1);
    auto f = oracle::random_field(g.size(), 3);
    auto path = (std::filesystem::temp_directory_path() / "magschro_snap.bin").string();
    write_snapshot(path, {g, 3, 0.3, R"({"xi":[1.0,0.0]})"}, f);
    SnapshotHeader h;
    auto back = read_snapshot(path, &h);
    CHECK(h.slice == 3);
    CHECK(h.grid.points == 16);
    CHECK(oracle::max_rel_error(back, f) == 0.0);
    std::remove(path.c_str());
}
