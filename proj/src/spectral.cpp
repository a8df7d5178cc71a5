#include "hyperlin/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hyperlin/numerics.hpp"

namespace hyperlin::spectral {

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::PoincareContraction: return "poincare-contraction";
        case DomainKind::PoincareExpansion: return "poincare-expansion";
        case DomainKind::Siegel: return "siegel";
        case DomainKind::Invalid: return "invalid";
    }
    return "invalid";
}

DomainKind classify_domain(const SpectralParams& p) {
    const double m1 = std::abs(p.lambda1), m2 = std::abs(p.lambda2);
    if (!std::isfinite(m1) || !std::isfinite(m2)) return DomainKind::Invalid;
    if (m1 == 0.0 || m2 == 0.0 || m1 == 1.0 || m2 == 1.0) return DomainKind::Invalid;
    if (m1 < 1.0 && m2 < 1.0) return DomainKind::PoincareContraction;
    if (m1 > 1.0 && m2 > 1.0) return DomainKind::PoincareExpansion;
    return DomainKind::Siegel;
}

Normalized normalize_to_contraction(const SpectralParams& p) {
    if (classify_domain(p) != DomainKind::PoincareExpansion) return {p, false};
    // the expansion case reduces to the contraction case through the inverse
    return {{1.0 / p.lambda1, 1.0 / p.lambda2, p.alpha}, true};
}

namespace {

// Sorts a contraction so that |l1| <= |l2| (the exponent formulas assume the
// first direction is the stronger one).
SpectralParams sorted_contraction(const SpectralParams& p) {
    SpectralParams q = p;
    if (std::abs(q.lambda1) > std::abs(q.lambda2)) std::swap(q.lambda1, q.lambda2);
    return q;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Piecewise sharp bound for the contraction case, per the known results:
//   alpha1 < alpha <= 1          -> beta = alpha
//   alpha  = alpha1 <= 1         -> any beta in (0, alpha); supremum reported
//   alpha  = 1, alpha1 > 1       -> beta = 1/alpha1
//   alpha0 < alpha < min(1,alpha1) -> beta = alpha/alpha0 - 1
//   alpha <= alpha0              -> no C^1 linearization in general
CurveRow contraction_row(double alpha, double alpha0, double alpha1) {
    CurveRow row;
    row.alpha = alpha;
    if (alpha <= alpha0) {
        row.beta = nan();
        row.differentiable_only = true;
        return row;
    }
    if (alpha == alpha1) {  // only reachable when alpha1 <= 1
        row.beta = alpha;
        row.open_endpoint = alpha1 < 1.0;
        if (alpha1 == 1.0) row.beta = 1.0 / alpha1;  // continuity with the line below
        return row;
    }
    if (alpha > alpha1) {
        row.beta = alpha;
        return row;
    }
    if (alpha == 1.0 && alpha1 > 1.0) {
        row.beta = 1.0 / alpha1;
        return row;
    }
    row.beta = alpha / alpha0 - 1.0;
    return row;
}

}  // namespace

DerivedExponents derived_exponents(const SpectralParams& p0) {
    const DomainKind kind0 = classify_domain(p0);
    if (kind0 == DomainKind::Invalid)
        throw std::domain_error("derived_exponents: invalid (non-hyperbolic) eigenvalues");
    SpectralParams p = normalize_to_contraction(p0).params;
    const DomainKind kind = classify_domain(p);
    if (kind == DomainKind::PoincareContraction) p = sorted_contraction(p);

    const double l1 = std::log(std::abs(p.lambda1));
    const double l2 = std::log(std::abs(p.lambda2));
    DerivedExponents d;
    d.alpha0 = 1.0 - l2 / l1;
    d.alpha1 = l1 / l2 - 1.0;
    d.sigma = l2 / l1;

    if (kind == DomainKind::Siegel) {
        d.beta = siegel_beta(p);
    } else {
        CurveRow row = contraction_row(p.alpha, d.alpha0, d.alpha1);
        d.differentiable_only = row.differentiable_only;
        d.beta_open_endpoint = row.open_endpoint;
        if (!row.differentiable_only) d.beta = row.beta;
    }
    return d;
}

double siegel_beta(const SpectralParams& p) {
    if (classify_domain(p) != DomainKind::Siegel)
        throw std::domain_error("siegel_beta: parameters are not in the Siegel domain");
    const double sigma = std::log(std::abs(p.lambda2)) / std::log(std::abs(p.lambda1));
    const double prod = std::abs(p.lambda1 * p.lambda2);
    if (prod <= 1.0) return -sigma / (1.0 - sigma) * p.alpha;
    return p.alpha / (1.0 - sigma);
}

int figure_for(const SpectralParams& p0) {
    const SpectralParams p = normalize_to_contraction(p0).params;
    switch (classify_domain(p)) {
        case DomainKind::PoincareContraction: {
            const DerivedExponents d = derived_exponents(p);
            return d.alpha1 >= 1.0 ? 1 : 2;
        }
        case DomainKind::Siegel:
            return std::abs(p.lambda1 * p.lambda2) <= 1.0 ? 3 : 4;
        default:
            throw std::domain_error("figure_for: invalid eigenvalues");
    }
}

std::vector<CurveRow> sharpness_curve(int figure, const SpectralParams& p0,
                                      const std::vector<double>& alpha_grid) {
    if (figure < 1 || figure > 4)
        throw std::invalid_argument("sharpness_curve: figure must be 1..4");
    const SpectralParams p = normalize_to_contraction(p0).params;
    if (figure_for(p) != figure)
        throw std::domain_error("sharpness_curve: parameters do not match figure " +
                                std::to_string(figure));
    for (double a : alpha_grid)
        if (!(a > 0.0 && a <= 1.0))
            throw std::invalid_argument("sharpness_curve: alpha grid point outside (0,1]");

    std::vector<CurveRow> rows;
    rows.reserve(alpha_grid.size());
    if (figure <= 2) {
        SpectralParams q = sorted_contraction(p);
        q.alpha = 1.0;  // exponents do not depend on alpha
        const DerivedExponents d = derived_exponents(q);
        for (double a : alpha_grid) rows.push_back(contraction_row(a, d.alpha0, d.alpha1));
    } else {
        const double sigma =
            std::log(std::abs(p.lambda2)) / std::log(std::abs(p.lambda1));
        const double slope =
            figure == 3 ? -sigma / (1.0 - sigma) : 1.0 / (1.0 - sigma);
        for (double a : alpha_grid) {
            CurveRow row;
            row.alpha = a;
            row.beta = slope * a;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace hyperlin::spectral
