#include "magschro/stats.hpp"

#include "magschro/common.hpp"

namespace magschro {

namespace {

double r_squared(std::span<const double> x, std::span<const double> y, const LineFit& f) {
    double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double res = 0, tot = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double e = y[i] - f.intercept - f.slope * x[i];
        res += e * e;
        tot += (y[i] - mean) * (y[i] - mean);
    }
    return tot > 0 ? 1 - res / tot : (res == 0 ? 1.0 : 0.0);
}

void check(std::span<const double> x, std::span<const double> y, std::size_t min) {
    if (x.size() != y.size()) throw InvalidArgument("fit needs equally many x and y");
    if (x.size() < min) throw InvalidArgument("too few points to fit");
}

}  // namespace

LineFit linear_fit(std::span<const double> x, std::span<const double> y) {
    check(x, y, 2);
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double d = n * sxx - sx * sx;
    if (d == 0) throw InvalidArgument("fit abscissae are all equal");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / d;
    f.intercept = (sy - f.slope * sx) / n;
    f.r2 = r_squared(x, y, f);
    return f;
}

LineFit origin_fit(std::span<const double> x, std::span<const double> y) {
    check(x, y, 1);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    if (sxx == 0) throw InvalidArgument("fit abscissae are all zero");
    LineFit f;
    f.slope = sxy / sxx;
    f.r2 = r_squared(x, y, f);
    return f;
}

}  // namespace magschro
