#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hyperlin::spectral {

// Eigenvalue data of the linear part diag(lambda1, lambda2) together with the
// Holder exponent of the map's derivative.
struct SpectralParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double alpha = 1.0;  // in (0, 1]
};

enum class DomainKind {
    PoincareContraction,  // 0 < |l1| < |l2| < 1
    PoincareExpansion,    // both moduli > 1 (handled by inverting)
    Siegel,               // |l1| < 1 < |l2|
    Invalid,              // an eigenvalue on the unit circle or zero
};

std::string to_string(DomainKind k);

DomainKind classify_domain(const SpectralParams& p);

// Replaces an expansion by the eigenvalues of the inverse map; `flipped`
// records whether anything happened.
struct Normalized {
    SpectralParams params;
    bool flipped = false;
};
Normalized normalize_to_contraction(const SpectralParams& p);

struct DerivedExponents {
    double alpha0 = 0.0;  // 1 - log|l2|/log|l1|
    double alpha1 = 0.0;  // log|l1|/log|l2| - 1
    double sigma = 0.0;   // log|l2|/log|l1|
    // Predicted sharp derivative-Holder exponent of the linearization for the
    // given domain; unset below the C^1 threshold in the contraction case.
    std::optional<double> beta;
    bool beta_open_endpoint = false;   // supremum only, not attained
    bool differentiable_only = false;  // contraction case with alpha <= alpha0
};

DerivedExponents derived_exponents(const SpectralParams& p);

// The Siegel-only exponent (two branches split at |l1*l2| = 1). Requesting it
// for non-Siegel parameters is a domain mismatch.
double siegel_beta(const SpectralParams& p);

struct CurveRow {
    double alpha = 0.0;
    double beta = 0.0;  // NaN when only differentiability at the origin holds
    bool differentiable_only = false;
    bool open_endpoint = false;
};

// Figure ids: 1 contraction with alpha1 >= 1, 2 contraction with alpha1 < 1,
// 3 Siegel with |l1*l2| <= 1, 4 Siegel with |l1*l2| > 1.
std::vector<CurveRow> sharpness_curve(int figure, const SpectralParams& p,
                                      const std::vector<double>& alpha_grid);

// Figure id implied by the parameters.
int figure_for(const SpectralParams& p);

}  // namespace hyperlin::spectral
