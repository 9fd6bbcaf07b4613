#include "magschro/error_terms.hpp"

#include "magschro/fourier.hpp"

namespace magschro {

ComplexField ErrorTermGroups::group_sum() const {
    ComplexField s(commutator.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = commutator[i] + high_low[i] + high_high[i];
    return s;
}

namespace {

void check_inputs(const Grid& g, const std::vector<RealField>& A, std::span<const cplx> u) {
    if (static_cast<int>(A.size()) != g.dim) throw InvalidArgument("potential needs n components");
    for (const auto& a : A)
        if (a.size() != g.size()) throw InvalidArgument("potential component size mismatch");
    if (u.size() != g.size()) throw InvalidArgument("field size mismatch");
}

}  // namespace

ComplexField low_band_transport(const Grid& g, const std::vector<RealField>& A, std::span<const cplx> u, int k,
                                const CutoffPair& c) {
    check_inputs(g, A, u);
    auto uk = band_piece(g, u, k, c);
    std::vector<RealField> lo(g.dim);
    for (int a = 0; a < g.dim; ++a) lo[a] = real_part(below_piece(g, to_complex(A[a]), k - 4, c));
    return spectral_gradient_dot(g, lo, uk);
}

ErrorTermGroups error_term_slice(const Grid& g, const std::vector<RealField>& A, std::span<const cplx> u, int k,
                                 const CutoffPair& c) {
    check_inputs(g, A, u);
    const std::size_t M = g.size();
    ErrorTermGroups out;
    out.commutator.assign(M, 0.0);
    out.high_low.assign(M, 0.0);
    out.high_high.assign(M, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        auto du = spectral_derivative(g, u, a);
        auto grp = paraproduct_split(g, to_complex(A[a]), du, k, c);
        for (std::size_t i = 0; i < M; ++i) {
            out.commutator[i] += grp.commutator[i];
            out.high_low[i] += grp.high_low[i];
            out.high_high[i] += grp.high_high[i];
        }
    }
    auto full = band_piece(g, spectral_gradient_dot(g, A, u), k, c);
    auto lo = low_band_transport(g, A, u, k, c);
    out.direct.resize(M);
    for (std::size_t i = 0; i < M; ++i) out.direct[i] = full[i] - lo[i];
    return out;
}

}  // namespace magschro
