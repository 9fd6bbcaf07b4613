#pragma once

#include "magschro/littlewood_paley.hpp"

namespace magschro {

// E^k = P_k(A·∇u) - A_{<=k-4}·∇u_k, with A_{<=k-4} = P_{<=k-4}A. Summed over
// components, the paraproduct groups give E^k = commutator + high_low + high_high.
struct ErrorTermGroups {
    ComplexField commutator, high_low, high_high;
    ComplexField direct;  // computed from the definition
    ComplexField group_sum() const;
};

ErrorTermGroups error_term_slice(const Grid& g, const std::vector<RealField>& A, std::span<const cplx> u, int k,
                                 const CutoffPair& c = default_cutoffs());

// A_{<=k-4}·∇u_k on one slice.
ComplexField low_band_transport(const Grid& g, const std::vector<RealField>& A, std::span<const cplx> u, int k,
                                const CutoffPair& c = default_cutoffs());

}  // namespace magschro
