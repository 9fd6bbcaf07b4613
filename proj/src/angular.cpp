#include "magschro/angular.hpp"

#include "magschro/diagnostics.hpp"
#include "magschro/fourier.hpp"
#include "magschro/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace magschro {

namespace {

using Vec = std::array<double, 3>;

double chord(const Vec& a, const Vec& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

Vec normalized(Vec v) {
    double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (auto& c : v) c /= r;
    return v;
}

double cap_profile(double rho) { return rho >= 1 ? 0.0 : 1.0 - smooth_step(2 * rho - 1); }

}  // namespace

double AngularNet::radius() const { return std::ldexp(1.0, -m); }

AngularNet angular_net(int n, int m) {
    if (m < 0) throw InvalidArgument("net scale m must be >= 0");
    AngularNet net;
    net.n = n;
    net.m = m;
    if (n == 2) {
        const int M = static_cast<int>(std::ceil(kTwoPi * std::ldexp(1.0, m)));
        for (int j = 0; j < M; ++j) net.directions.push_back({std::cos(kTwoPi * j / M), std::sin(kTwoPi * j / M), 0.0});
    } else if (n == 3) {
        const int R = static_cast<int>(std::ceil(kPi / (0.65 * net.radius())));
        const double d = kPi / R;
        for (int i = 0; i < R; ++i) {
            const double ph = (i + 0.5) * d, lo = ph - d / 2, hi = ph + d / 2;
            const double smax = (lo <= kPi / 2 && hi >= kPi / 2) ? 1.0 : std::max(std::sin(lo), std::sin(hi));
            const int c = std::max(1, static_cast<int>(std::ceil(kTwoPi * smax / d)));
            for (int q = 0; q < c; ++q) {
                const double az = (q + 0.5 * (i % 2)) * kTwoPi / c;
                net.directions.push_back({std::sin(ph) * std::cos(az), std::sin(ph) * std::sin(az), std::cos(ph)});
            }
        }
    } else {
        throw InvalidArgument("angular nets are built for n = 2 and n = 3");
    }
    return net;
}

std::vector<std::array<double, 3>> random_sphere_points(int n, int count, std::uint64_t seed) {
    if (n < 2 || n > 3) throw InvalidArgument("sphere samples for n = 2, 3");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N01;
    std::vector<Vec> out;
    while (static_cast<int>(out.size()) < count) {
        Vec v{N01(rng), N01(rng), n == 3 ? N01(rng) : 0.0};
        if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] < 1e-20) continue;
        out.push_back(normalized(v));
    }
    return out;
}

NetAudit audit_net(const AngularNet& net, int samples, std::uint64_t seed) {
    NetAudit a;
    const double r = net.radius();
    auto pts = random_sphere_points(net.n, samples, seed);
    for (const auto& p : pts) {
        double best = 1e300;
        int inside = 0;
        for (const auto& d : net.directions) {
            double c = chord(p, d);
            best = std::min(best, c);
            if (c < r) ++inside;
        }
        a.covering_radius = std::max(a.covering_radius, best / r);
        a.overlap = std::max(a.overlap, inside);
    }
    a.separation = 1e300;
    for (std::size_t i = 0; i < net.count(); ++i)
        for (std::size_t j = i + 1; j < net.count(); ++j)
            a.separation = std::min(a.separation, chord(net.directions[i], net.directions[j]) / r);
    a.count_constant = net.count() / std::ldexp(1.0, net.m * (net.n - 1));
    return a;
}

CapPartition::CapPartition(AngularNet net) : net_(std::move(net)) {
    if (net_.directions.empty()) throw InvalidArgument("empty net");
}

std::vector<std::pair<std::size_t, double>> CapPartition::evaluate(const Vec& omega) const {
    const double s = std::ldexp(1.0, net_.m);
    std::vector<std::pair<std::size_t, double>> out;
    double total = 0;
    for (std::size_t j = 0; j < net_.count(); ++j) {
        double b = cap_profile(s * chord(omega, net_.directions[j]));
        if (b > 0) {
            out.emplace_back(j, b);
            total += b;
        }
    }
    if (total <= 0) throw NumericalFailure("angular net does not cover the sphere");
    for (auto& [j, v] : out) v /= total;
    return out;
}

double CapPartition::value(std::size_t j, const Vec& omega) const {
    for (const auto& [i, v] : evaluate(omega))
        if (i == j) return v;
    return 0.0;
}

std::size_t CapPartition::nearest(const Vec& omega) const {
    std::size_t best = 0;
    double d = 1e300;
    for (std::size_t j = 0; j < net_.count(); ++j) {
        double c = chord(omega, net_.directions[j]);
        if (c < d) {
            d = c;
            best = j;
        }
    }
    return best;
}

CapPartition cap_partition(const AngularNet& net) { return CapPartition(net); }

PartitionAudit audit_partition(const CapPartition& p, int samples, std::uint64_t seed) {
    PartitionAudit a;
    const int n = p.net().n;
    const double r = p.net().radius(), h = 1e-4 * r;
    for (const auto& w : random_sphere_points(n, samples, seed)) {
        double s = 0;
        for (const auto& [j, v] : p.evaluate(w)) s += v;
        a.max_sum_error = std::max(a.max_sum_error, std::abs(s - 1));
        // tangent directions
        std::vector<Vec> tang;
        if (n == 2) {
            tang.push_back({-w[1], w[0], 0});
        } else {
            Vec e = std::abs(w[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
            Vec t1{w[1] * e[2] - w[2] * e[1], w[2] * e[0] - w[0] * e[2], w[0] * e[1] - w[1] * e[0]};
            t1 = normalized(t1);
            Vec t2{w[1] * t1[2] - w[2] * t1[1], w[2] * t1[0] - w[0] * t1[2], w[0] * t1[1] - w[1] * t1[0]};
            tang = {t1, t2};
        }
        for (const auto& t : tang) {
            Vec wp, wm;
            for (int c = 0; c < 3; ++c) {
                wp[c] = w[c] + h * t[c];
                wm[c] = w[c] - h * t[c];
            }
            auto ep = p.evaluate(normalized(wp)), em = p.evaluate(normalized(wm));
            std::map<std::size_t, double> d;
            for (const auto& [j, v] : ep) d[j] += v;
            for (const auto& [j, v] : em) d[j] -= v;
            for (const auto& [j, v] : d) a.derivative_bound = std::max(a.derivative_bound, std::abs(v) / (2 * h) * r);
        }
    }
    return a;
}

// ---------------------------------------------------------------- ray bound

RayBoundResult pointwise_ray_bound_check(const Grid& g, std::span<const cplx> H, int k, const RayBoundOptions& opt,
                                         const CutoffPair& cut) {
    if (g.dim != 2) throw InvalidArgument("pointwise ray bound is implemented for n = 2");
    if (H.size() != g.size()) throw InvalidArgument("field size mismatch");
    if (opt.upsample < 1 || opt.m_min < 0 || opt.m_max < opt.m_min) throw InvalidArgument("bad ray bound options");
    RayBoundResult out;
    const int N = g.points, U = opt.upsample, NF = N * U;
    const double unit = std::ldexp(1.0, -k);
    // |H| on the refined lattice
    Grid gf = make_grid(2, NF, g.length, g.dt, g.final_time);
    auto spec = fourier_forward(g, H);
    ComplexField fine_spec(gf.size(), 0.0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            int p = g.signed_mode(i), q = g.signed_mode(j);
            if (std::abs(p) == N / 2 || std::abs(q) == N / 2) continue;
            int fi = (p + NF) % NF, fj = (q + NF) % NF;
            fine_spec[gf.ravel({fi, fj, 0})] = spec[g.ravel({i, j, 0})];
        }
    auto fine = fourier_inverse(gf, fine_spec);
    RealField absH(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) absH[i] = std::abs(fine[i]);
    const double dxf = gf.dx(), L = g.length;
    auto sample = [&](double x0, double x1) {
        double u = (x0 + L / 2) / dxf, v = (x1 + L / 2) / dxf;
        double fu = std::floor(u), fv = std::floor(v);
        double a = u - fu, b = v - fv;
        int i0 = ((static_cast<long>(fu) % NF) + NF) % NF, j0 = ((static_cast<long>(fv) % NF) + NF) % NF;
        int i1 = (i0 + 1) % NF, j1 = (j0 + 1) % NF;
        return (1 - a) * (1 - b) * absH[i0 * NF + j0] + a * (1 - b) * absH[i1 * NF + j0] + (1 - a) * b * absH[i0 * NF + j1] +
               a * b * absH[i1 * NF + j1];
    };
    // peak and ‖H‖₁
    std::size_t peak = 0;
    double l1 = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        l1 += std::abs(H[i]);
        if (std::abs(H[i]) > std::abs(H[peak])) peak = i;
    }
    l1 *= g.cell_volume();
    auto pk = g.unravel(peak);
    const double c0 = g.coordinate(pk[0]), c1 = g.coordinate(pk[1]);
    // ray families
    struct Family {
        std::vector<Vec> dirs;
        std::vector<double> z, w;
    };
    std::vector<Family> fam;
    for (int m = opt.m_min; m <= opt.m_max; ++m) {
        const double scale = std::ldexp(1.0, m - k);  // 2^l
        const double z0 = 0.5 * cut.transition_begin() * scale, z1 = cut.transition_end() * scale;
        if (z1 > L / 2) {
            out.truncated_m.push_back(m);
            continue;
        }
        Family f;
        f.dirs = angular_net(2, m).directions;
        const int nz = std::max(2, static_cast<int>(std::ceil((z1 - z0) / (opt.z_step * unit))));
        for (int q = 0; q <= nz; ++q) {
            double z = z0 + (z1 - z0) * q / nz;
            f.z.push_back(z);
            f.w.push_back((q == 0 || q == nz ? 0.5 : 1.0) * (z1 - z0) / nz * cut.phi(z / scale));
        }
        fam.push_back(std::move(f));
    }
    if (!out.truncated_m.empty()) {
        std::ostringstream os;
        os << "ray bound drops " << out.truncated_m.size() << " net scales whose rays exceed L/2";
        warn("ray-bound-truncated", os.str());
    }
    const double reach = (cut.transition_end() * std::ldexp(1.0, opt.m_max) + 4) / opt.x_step;
    const int R = static_cast<int>(std::ceil(reach));
    const int W = 2 * R + 1;
    std::vector<double> val(static_cast<std::size_t>(W) * W, 0.0);
    parallel_for(val.size(), [&](std::size_t s) {
        const double x0 = c0 + (static_cast<int>(s / W) - R) * opt.x_step * unit;
        const double x1 = c1 + (static_cast<int>(s % W) - R) * opt.x_step * unit;
        double tot = 0;
        for (const auto& f : fam)
            for (const auto& d : f.dirs)
                for (std::size_t q = 0; q < f.z.size(); ++q)
                    if (f.w[q] != 0) tot += f.w[q] * sample(x0 + f.z[q] * d[0], x1 + f.z[q] * d[1]);
        val[s] = tot;
    });
    std::size_t best = 0;
    for (std::size_t s = 0; s < val.size(); ++s)
        if (val[s] > val[best]) best = s;
    out.lhs = val[best];
    out.argmax = {c0 + (static_cast<int>(best / W) - R) * opt.x_step * unit,
                  c1 + (static_cast<int>(best % W) - R) * opt.x_step * unit, 0.0};
    out.rhs = std::ldexp(1.0, k) * l1;
    out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0;
    return out;
}

// ---------------------------------------------------------------- decay

DecayTable cap_oscillatory_decay(const std::vector<Cap>& caps, const AnnulusCutoff& omega, const DecayOptions& opt) {
    if (opt.times.size() < 2) throw InvalidArgument("decay table needs at least two times");
    for (double t : opt.times)
        if (!(t > 0)) throw InvalidArgument("decay times must be positive");
    const int d = opt.fixed_xi1 ? 1 : 2;
    Grid G = make_grid(d, opt.points, opt.length, 1.0, 1.0);
    std::map<int, CapPartition> parts;
    std::vector<std::pair<const CapPartition*, std::size_t>> chosen;
    for (const auto& c : caps) {
        auto it = parts.find(c.k);
        if (it == parts.end()) it = parts.emplace(c.k, cap_partition(angular_net(2, c.k))).first;
        chosen.emplace_back(&it->second, it->second.nearest(normalized(c.theta)));
    }
    const auto& T = lattice_tables(G);
    ComplexField amp(G.size(), 0.0);
    double reach = 0;
    for (std::size_t i = 0; i < G.size(); ++i) {
        const double x0 = d == 1 ? opt.xi1 : T.xi[2 * i], x1 = d == 1 ? T.xi[i] : T.xi[2 * i + 1];
        const double r = std::hypot(x0, x1), o = omega(r);
        if (o == 0) continue;
        double v = o;
        for (const auto& [p, j] : chosen) v *= p->value(j, {x0 / r, x1 / r, 0.0});
        amp[i] = v;
        if (v != 0) reach = std::max(reach, d == 1 ? std::abs(x1) : r);
    }
    DecayTable out;
    out.expected_slope = -0.5 * d;
    for (auto v : amp) out.at_zero += v.real();
    out.at_zero /= std::pow(G.length, d);
    if (out.at_zero == 0) throw InvalidArgument("cap product vanishes on the annulus");
    auto gcheck = fourier_inverse(G, amp);
    // Y: radius outside of which ∫|ǧ| is below tail_tolerance·max|amplitude|, which bounds
    // the error of sup|ĥ_t| from undersampling the chirp out there
    double amax = 0;
    for (auto v : amp) amax = std::max(amax, std::abs(v));
    std::vector<std::pair<double, double>> ry(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) {
        double y2 = 0;
        for (int a = 0; a < d; ++a) y2 += std::pow(T.x[i * d + a], 2);
        ry[i] = {std::sqrt(y2), std::abs(gcheck[i]) * G.cell_volume()};
    }
    std::sort(ry.begin(), ry.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double tail = 0, Y = 0;
    for (const auto& [r, v] : ry) {
        tail += v;
        if (tail > opt.tail_tolerance * amax) {
            Y = r;
            break;
        }
    }
    out.tail_radius = Y;
    if (Y > 0.45 * G.length) {
        std::ostringstream os;
        os << "inverse transform of the cap amplitude reaches |y| = " << Y << " in a box of length " << G.length;
        warn("decay-wrap", os.str());
    }
    for (double t : opt.times) {
        if (reach + Y / (4 * kPi * t) > 0.9 * G.nyquist()) {
            std::ostringstream os;
            os << "chirp at t = " << t << " needs frequency " << reach + Y / (4 * kPi * t) << " above 0.9 Nyquist "
               << 0.9 * G.nyquist();
            throw NumericalFailure("oscillation undersampled: " + os.str());
        }
        ComplexField h(G.size());
        for (std::size_t i = 0; i < G.size(); ++i) {
            double y2 = 0;
            for (int a = 0; a < d; ++a) y2 += std::pow(T.x[i * d + a], 2);
            h[i] = gcheck[i] * std::polar(1.0, y2 / (4 * t));
        }
        auto hh = fourier_forward(G, h);
        double m = 0;
        for (auto v : hh) m = std::max(m, std::abs(v));
        out.times.push_back(t);
        out.sup.push_back(std::pow(4 * kPi * t, -0.5 * d) * m);
    }
    std::vector<double> lt, ls;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        lt.push_back(std::log(out.times[i]));
        ls.push_back(std::log(out.sup[i]));
        out.scaled_max = std::max(out.scaled_max, out.sup[i] * std::pow(out.times[i], 0.5 * d));
    }
    auto fit = linear_fit(lt, ls);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    return out;
}

}  // namespace magschro
