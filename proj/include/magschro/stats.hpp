#pragma once

#include <span>

namespace magschro {

struct LineFit {
    double intercept = 0, slope = 0;
    double r2 = 0;  // against the centred total sum of squares
};
LineFit linear_fit(std::span<const double> x, std::span<const double> y);
// y = slope·x.
LineFit origin_fit(std::span<const double> x, std::span<const double> y);

}  // namespace magschro
