#include "magschro/grid.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace magschro {

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(points);
    return s;
}

double Grid::cell_volume() const { return std::pow(dx(), dim); }

std::size_t Grid::time_steps() const {
    return static_cast<std::size_t>(std::llround(final_time / dt));
}

std::vector<double> Grid::physical_frequencies() const {
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) out[i] = (i - points / 2) / length;
    return out;
}

std::array<int, 3> Grid::unravel(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int d = dim - 1; d >= 0; --d) {
        ijk[d] = static_cast<int>(idx % points);
        idx /= points;
    }
    return ijk;
}

std::size_t Grid::ravel(const std::array<int, 3>& ijk) const {
    std::size_t idx = 0;
    for (int d = 0; d < dim; ++d) {
        int i = ((ijk[d] % points) + points) % points;
        idx = idx * points + i;
    }
    return idx;
}

bool Grid::same_space(const Grid& o) const {
    return dim == o.dim && points == o.points && length == o.length;
}

Grid make_grid(int n, int N, double L, double dt, double T) {
    if (n < 1 || n > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
    if (N < 8 || !is_power_of_two(N)) throw InvalidArgument("grid points per axis must be a power of two >= 8");
    if (!(L > 0)) throw InvalidArgument("box length must be positive");
    if (!(dt > 0)) throw InvalidArgument("time step must be positive");
    if (dt > T) throw InvalidArgument("time step exceeds final time");
    double steps = T / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw InvalidArgument("final time must be an integer multiple of dt");
    return Grid{n, N, L, dt, T};
}

Grid with_time(const Grid& g, double dt, double T) { return make_grid(g.dim, g.points, g.length, dt, T); }

const LatticeTables& lattice_tables(const Grid& g) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, std::uint64_t>, std::unique_ptr<LatticeTables>> cache;
    std::uint64_t lbits;
    std::memcpy(&lbits, &g.length, sizeof lbits);
    auto key = std::make_tuple(g.dim, g.points, lbits);
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    auto t = std::make_unique<LatticeTables>();
    const std::size_t n = g.size();
    t->x.resize(g.dim * n);
    t->xi.resize(g.dim * n);
    t->xi_norm.resize(n);
    t->parity.resize(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        auto ijk = g.unravel(idx);
        double r2 = 0;
        int par = 0;
        for (int d = 0; d < g.dim; ++d) {
            t->x[idx * g.dim + d] = g.coordinate(ijk[d]);
            double f = g.frequency(ijk[d]);
            t->xi[idx * g.dim + d] = f;
            r2 += f * f;
            par += ijk[d];
        }
        t->xi_norm[idx] = std::sqrt(r2);
        t->parity[idx] = (par % 2 == 0) ? 1.0 : -1.0;
    }
    auto& ref = *t;
    cache.emplace(key, std::move(t));
    return ref;
}

SpaceTimeField SpaceTimeField::zeros(const Grid& g) {
    std::vector<double> times(g.time_steps() + 1);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = g.time(i);
    return zeros(g, times);
}

SpaceTimeField SpaceTimeField::zeros(const Grid& g, const std::vector<double>& times) {
    SpaceTimeField u{g, times, {}};
    u.slices.assign(times.size(), ComplexField(g.size(), cplx{}));
    return u;
}

SpaceTimeField scaled(const SpaceTimeField& u, cplx a) {
    SpaceTimeField out = u;
    for (auto& s : out.slices)
        for (auto& v : s) v *= a;
    return out;
}

namespace {
SpaceTimeField combine(const SpaceTimeField& a, const SpaceTimeField& b, double sign) {
    if (!a.grid.same_space(b.grid) || a.slice_count() != b.slice_count())
        throw InvalidArgument("space-time fields live on different lattices");
    SpaceTimeField out = a;
    for (std::size_t t = 0; t < out.slices.size(); ++t)
        for (std::size_t i = 0; i < out.slices[t].size(); ++i) out.slices[t][i] += sign * b.slices[t][i];
    return out;
}
}  // namespace

SpaceTimeField sum(const SpaceTimeField& a, const SpaceTimeField& b) { return combine(a, b, 1.0); }
SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b) { return combine(a, b, -1.0); }

ComplexField to_complex(std::span<const double> v) { return ComplexField(v.begin(), v.end()); }

RealField real_part(std::span<const cplx> v) {
    RealField out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

double max_abs_imag(std::span<const cplx> v) {
    double m = 0;
    for (auto z : v) m = std::max(m, std::abs(z.imag()));
    return m;
}

}  // namespace magschro
