#include "magschro/cutoffs.hpp"

#include "magschro/common.hpp"

#include <cmath>

namespace magschro {

namespace {
double e(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace

double smooth_step(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double p = e(x), q = e(1 - x);
    return p / (p + q);
}

double smooth_step_d1(double x) {
    if (x <= 0 || x >= 1) return 0.0;
    double p = e(x), q = e(1 - x);
    double s = p + q;
    double h = 1 / (x * x) + 1 / ((1 - x) * (1 - x));
    return p * q * h / (s * s);
}

double smooth_step_d2(double x) {
    if (x <= 0 || x >= 1) return 0.0;
    double p = e(x), q = e(1 - x);
    double s = p + q;
    double u = 1 / (x * x), v = 1 / ((1 - x) * (1 - x));
    double h = u + v;
    double dh = -2 / (x * x * x) + 2 / ((1 - x) * (1 - x) * (1 - x));
    double d1 = p * q * h / (s * s);
    return d1 * (u - v + dh / h - 2 * (p * u - q * v) / s);
}

CutoffPair::CutoffPair(double g) : glue_(g), a_(1.5 - 2 * g), b_(1.5 + 2 * g) {
    if (!(g > 0 && g <= 0.25)) throw InvalidArgument("glue width must lie in (0, 1/4]");
}

double CutoffPair::chi(double r) const {
    r = std::abs(r);
    return smooth_step((b_ - r) / (b_ - a_));
}

double CutoffPair::chi_d1(double r) const {
    double s = r < 0 ? -1.0 : 1.0;
    r = std::abs(r);
    return -s * smooth_step_d1((b_ - r) / (b_ - a_)) / (b_ - a_);
}

double CutoffPair::chi_d2(double r) const {
    r = std::abs(r);
    double w = b_ - a_;
    return smooth_step_d2((b_ - r) / w) / (w * w);
}

double CutoffPair::band(int k, double r) const { return phi(std::ldexp(r, -k)); }
double CutoffPair::below(int k, double r) const { return chi(std::ldexp(r, -k)); }

CutoffPair build_cutoffs(double glue_width) { return CutoffPair(glue_width); }

const CutoffPair& default_cutoffs() {
    static const CutoffPair c(0.125);
    return c;
}

double AnnulusCutoff::operator()(double r) const {
    double s = std::ldexp(std::abs(r), -k_);
    return smooth_step((s - 0.5) / 0.25) * smooth_step((2.0 - s) / 0.5);
}

double AnnulusCutoff::flat_begin() const { return std::ldexp(0.75, k_); }
double AnnulusCutoff::flat_end() const { return std::ldexp(1.5, k_); }

}  // namespace magschro
