#pragma once

namespace magschro {

// exp(-1/x) glue: S = 0 for x <= 0, 1 for x >= 1, C^∞ in between.
double smooth_step(double x);
double smooth_step_d1(double x);
double smooth_step_d2(double x);

// χ ≡ 1 on [0, 3/2 - 2g], ≡ 0 on [3/2 + 2g, ∞), glue width g ∈ (0, 1/4].
// φ(r) = χ(r) - χ(2r).
class CutoffPair {
public:
    explicit CutoffPair(double glue_width = 0.125);

    double glue_width() const { return glue_; }
    double transition_begin() const { return a_; }
    double transition_end() const { return b_; }

    double chi(double r) const;
    double chi_d1(double r) const;
    double chi_d2(double r) const;
    double phi(double r) const { return chi(r) - chi(2.0 * r); }

    // Radial multipliers of P_k and P_{<=k}.
    double band(int k, double r) const;
    double below(int k, double r) const;

private:
    double glue_, a_, b_;
};

CutoffPair build_cutoffs(double glue_width);
const CutoffPair& default_cutoffs();

// Ω: smooth annulus bump with support [2^{k-1}, 2^{k+1}], ≡ 1 on 2^k [3/4, 3/2].
class AnnulusCutoff {
public:
    explicit AnnulusCutoff(int k_f = 0) : k_(k_f) {}
    int band() const { return k_; }
    double operator()(double r) const;
    double flat_begin() const;
    double flat_end() const;

private:
    int k_;
};

}  // namespace magschro
