#include "magschro/littlewood_paley.hpp"

#include "magschro/diagnostics.hpp"
#include "magschro/fourier.hpp"

#include <cmath>
#include <sstream>

namespace magschro {

BandRange representable_band_range(const Grid& g) {
    int lo = static_cast<int>(std::ceil(std::log2(4.0 / g.length) - 1e-12));
    int hi = static_cast<int>(std::floor(std::log2(g.nyquist() / 4.0) + 1e-12));
    return {lo, hi};
}

BandRange lattice_band_range(const Grid& g, const CutoffPair& c) {
    const auto& r = lattice_tables(g).xi_norm;
    double rmin = 1.0 / g.length, rmax = 0;
    for (double v : r) rmax = std::max(rmax, v);
    int lo = static_cast<int>(std::floor(std::log2(rmin / c.transition_end()))) - 1;
    int hi = static_cast<int>(std::ceil(std::log2(rmax / c.transition_begin()))) + 2;
    auto has_content = [&](int k) {
        for (double v : r)
            if (v > 0 && c.band(k, v) != 0.0) return true;
        return false;
    };
    while (lo < hi && !has_content(lo)) ++lo;
    while (hi > lo && !has_content(hi)) --hi;
    return {lo, hi};
}

std::vector<double> band_multiplier(const Grid& g, int k, const CutoffPair& c) {
    return radial_multiplier(g, [&](double r) { return c.band(k, r); });
}

std::vector<double> below_multiplier(const Grid& g, int k, const CutoffPair& c) {
    return radial_multiplier(g, [&](double r) { return c.below(k, r); });
}

namespace {
void check_band(const Grid& g, int k) {
    auto R = representable_band_range(g);
    if (!R.contains(k)) {
        std::ostringstream os;
        os << "band " << k << " outside representable range [" << R.k_min << ", " << R.k_max << "]";
        throw InvalidArgument(os.str());
    }
}
}  // namespace

ComplexField band_piece(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c) {
    auto m = band_multiplier(g, k, c);
    return apply_multiplier(g, f, std::span<const double>(m));
}

ComplexField below_piece(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c) {
    auto m = below_multiplier(g, k, c);
    return apply_multiplier(g, f, std::span<const double>(m));
}

ComplexField project_band(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c) {
    check_band(g, k);
    return band_piece(g, f, k, c);
}

ComplexField project_below(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c) {
    check_band(g, k);
    return below_piece(g, f, k, c);
}

ComplexField project_fat(const Grid& g, std::span<const cplx> f, int k, const CutoffPair& c) {
    check_band(g, k);
    auto m = radial_multiplier(g, [&](double r) { return c.band(k - 1, r) + c.band(k, r) + c.band(k + 1, r); });
    return apply_multiplier(g, f, std::span<const double>(m));
}

ComplexField BandDecomposition::reconstruct() const {
    ComplexField out = low_residual;
    for (const auto& p : pieces)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += high_residual[i];
    return out;
}

BandDecomposition decompose(const Grid& g, std::span<const cplx> f, BandRange range, const CutoffPair& c) {
    BandDecomposition d{g, range, {}, {}, {}};
    ComplexField spec(f.begin(), f.end());
    fft_inplace(g, spec, -1);
    auto apply = [&](const std::vector<double>& m) {
        ComplexField s = spec;
        multiply_and_invert(g, s, m);
        return s;
    };
    d.low_residual = apply(below_multiplier(g, range.k_min - 1, c));
    for (int k = range.k_min; k <= range.k_max; ++k) d.pieces.push_back(apply(band_multiplier(g, k, c)));
    auto top = below_multiplier(g, range.k_max, c);
    for (auto& v : top) v = 1.0 - v;
    d.high_residual = apply(top);
    return d;
}

SpaceTimeField band_piece(const SpaceTimeField& u, int k, const CutoffPair& c) {
    auto m = band_multiplier(u.grid, k, c);
    SpaceTimeField out{u.grid, u.times, {}};
    for (const auto& s : u.slices) out.slices.push_back(apply_multiplier(u.grid, s, std::span<const double>(m)));
    return out;
}

SpaceTimeField below_piece(const SpaceTimeField& u, int k, const CutoffPair& c) {
    auto m = below_multiplier(u.grid, k, c);
    SpaceTimeField out{u.grid, u.times, {}};
    for (const auto& s : u.slices) out.slices.push_back(apply_multiplier(u.grid, s, std::span<const double>(m)));
    return out;
}

ComplexField ParaproductGroups::group_sum() const {
    ComplexField out = low_high;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += commutator[i] + high_low[i] + high_high[i];
    return out;
}

ParaproductGroups paraproduct_split(const Grid& g, std::span<const cplx> f, std::span<const cplx> h, int k,
                                    const CutoffPair& c) {
    if (f.size() != g.size() || h.size() != g.size()) throw InvalidArgument("paraproduct inputs off grid");
    const std::size_t n = g.size();
    auto Pk = band_multiplier(g, k, c);
    auto Plo = below_multiplier(g, k - 4, c);
    auto f_lo = apply_multiplier(g, f, std::span<const double>(Plo));
    auto h_lo = apply_multiplier(g, h, std::span<const double>(Plo));
    auto h_k = apply_multiplier(g, h, std::span<const double>(Pk));
    ComplexField f_hi(n), prod(n), flo_h(n), fhi_hlo(n), fhi_hhi(n);
    for (std::size_t i = 0; i < n; ++i) {
        f_hi[i] = f[i] - f_lo[i];
        prod[i] = f[i] * h[i];
        flo_h[i] = f_lo[i] * h[i];
        fhi_hlo[i] = f_hi[i] * h_lo[i];
        fhi_hhi[i] = f_hi[i] * (h[i] - h_lo[i]);
    }
    ParaproductGroups out;
    out.direct = apply_multiplier(g, prod, std::span<const double>(Pk));
    out.low_high.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.low_high[i] = f_lo[i] * h_k[i];
    out.commutator = apply_multiplier(g, flo_h, std::span<const double>(Pk));
    for (std::size_t i = 0; i < n; ++i) out.commutator[i] -= out.low_high[i];
    out.high_low = apply_multiplier(g, fhi_hlo, std::span<const double>(Pk));
    out.high_high = apply_multiplier(g, fhi_hhi, std::span<const double>(Pk));
    return out;
}

double FrequencyBox::volume() const {
    double v = 1;
    for (double w : half_width) v *= 2 * w;
    return v;
}

bool FrequencyBox::contains(std::span<const double> xi) const {
    for (std::size_t d = 0; d < center.size(); ++d)
        if (std::abs(xi[d] - center[d]) > half_width[d]) return false;
    return true;
}

namespace {

// Spectral mass fraction outside a predicate region.
template <class Inside>
double leakage(const Grid& g, std::span<const cplx> f, Inside inside) {
    ComplexField spec(f.begin(), f.end());
    fft_inplace(g, spec, -1);
    const auto& t = lattice_tables(g);
    double tot = 0, out = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double p = std::norm(spec[i]);
        tot += p;
        if (!inside(i, std::span<const double>(&t.xi[i * g.dim], g.dim), t.xi_norm[i])) out += p;
    }
    return tot > 0 ? std::sqrt(out / tot) : 0.0;
}

std::vector<double> abs_values(std::span<const cplx> f) {
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
    return a;
}

}  // namespace

double bernstein_ratio(const Grid& g, std::span<const cplx> f, const FrequencyBox& Q, double p, double q) {
    if (static_cast<int>(Q.center.size()) != g.dim || Q.half_width.size() != Q.center.size())
        throw InvalidArgument("frequency box dimension mismatch");
    if (p > q) throw InvalidArgument("Bernstein ratio needs p <= q");
    double leak = leakage(g, f, [&](std::size_t, std::span<const double> xi, double) { return Q.contains(xi); });
    if (leak > 1e-8) throw InvalidArgument("spectrum leaks outside the frequency box");
    double np = lp_norm(g, f, p), nq = lp_norm(g, f, q);
    double expo = (std::isinf(p) ? 0.0 : 1.0 / p) - (std::isinf(q) ? 0.0 : 1.0 / q);
    return nq / (std::pow(Q.volume(), expo) * np);
}

double mixed_bernstein_ratio(const Grid& g, std::span<const cplx> f, int k, double p1, double p2, double r) {
    if (g.dim < 2) throw InvalidArgument("mixed Bernstein needs n >= 2");
    if (!(p1 > p2 && p2 >= r)) throw InvalidArgument("mixed Bernstein needs p1 > p2 >= r");
    const double lo = std::ldexp(0.5, k), hi = std::ldexp(2.0, k);
    double leak = leakage(g, f, [&](std::size_t, std::span<const double>, double rr) { return rr >= lo && rr <= hi; });
    if (leak > 1e-8) throw InvalidArgument("spectrum leaks outside the dyadic annulus");
    auto a = abs_values(f);
    double n1 = axis_mixed_norm(g, a, r, p1), n2 = axis_mixed_norm(g, a, r, p2);
    double inv1 = std::isinf(p1) ? 0.0 : 1.0 / p1;
    double scale = std::pow(2.0, k * (g.dim - 1) * (1.0 / p2 - inv1));
    return n1 / (scale * n2);
}

BesovResult besov_l2_norm(const SpaceTimeField& u, double s, const SpaceTimeNorm& norm, std::optional<BandRange> range,
                          const CutoffPair& c) {
    BesovResult res;
    res.range = range ? *range : representable_band_range(u.grid);
    const Grid& g = u.grid;
    std::vector<SpaceTimeField> bands;
    for (int k = res.range.k_min; k <= res.range.k_max; ++k) bands.push_back({g, u.times, {}});
    SpaceTimeField resid{g, u.times, {}};
    for (const auto& sl : u.slices) {
        auto d = decompose(g, sl, res.range, c);
        for (std::size_t b = 0; b < bands.size(); ++b) bands[b].slices.push_back(std::move(d.pieces[b]));
        for (std::size_t i = 0; i < d.low_residual.size(); ++i) d.low_residual[i] += d.high_residual[i];
        resid.slices.push_back(std::move(d.low_residual));
    }
    double acc = 0;
    for (std::size_t b = 0; b < bands.size(); ++b) {
        double nk = norm(bands[b]);
        res.band_norms.push_back(nk);
        acc += std::pow(2.0, 2 * s * (res.range.k_min + static_cast<int>(b))) * nk * nk;
    }
    res.value = std::sqrt(acc);
    res.residual_norm = norm(resid);
    double full = norm(u);
    if (full > 0 && res.residual_norm > 0.01 * full) {
        std::ostringstream os;
        os << "residual bands carry " << res.residual_norm / full << " of the norm";
        warn("besov-residual", os.str());
    }
    return res;
}

SequenceBound sequence_bound_check(std::span<const double> a, std::span<const double> b, double h, int l0) {
    if (!(h > 0)) throw InvalidArgument("sequence lemma needs h > 0");
    if (a.size() != b.size()) throw InvalidArgument("sequences must share an index set");
    const int len = static_cast<int>(a.size());
    SequenceBound out;
    out.schur_bound = std::pow(2.0, 2 * h) / (1 - std::pow(2.0, -h));
    if (len == 0) return out;
    // suffix[i] = Σ_{l >= l0 + i} 2^{-hl} a_l b_l
    std::vector<double> suffix(len + 1, 0.0);
    for (int i = len - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + std::pow(2.0, -h * (l0 + i)) * a[i] * b[i];
    double total = 0;
    // k <= l0 + 2: the inner sum is complete.
    total += suffix[0] * suffix[0] * std::pow(2.0, 2 * h * (l0 + 2)) / (1 - std::pow(2.0, -2 * h));
    for (int k = l0 + 3; k <= l0 + len + 1; ++k) {
        int i = k - 2 - l0;
        total += std::pow(2.0, 2 * h * k) * suffix[i] * suffix[i];
    }
    out.lhs = std::sqrt(total);
    double amax = 0, b2 = 0;
    for (int i = 0; i < len; ++i) {
        amax = std::max(amax, std::abs(a[i]));
        b2 += b[i] * b[i];
    }
    double den = amax * std::sqrt(b2);
    out.ratio = den > 0 ? out.lhs / den : 0.0;
    return out;
}

}  // namespace magschro
