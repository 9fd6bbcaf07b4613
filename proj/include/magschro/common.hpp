#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace magschro {

using cplx = std::complex<double>;
using ComplexField = std::vector<cplx>;
using RealField = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fixed-order pairwise summation; results do not depend on thread count.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

// Worker threads used by parallel_for (default 1).
void set_thread_count(int k);
int thread_count();
// fn(i) for i in [0, count), contiguous static chunks. fn must only write to
// slots owned by i, so the result does not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes, weights;
};
const GaussRule& gauss_legendre(int points);

inline bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace magschro
