#pragma once

#include <functional>
#include <vector>

#include "hyperlin/geometry.hpp"
#include "hyperlin/maps.hpp"

namespace hyperlin::conjugacy {

struct ConjugacyResult {
    VectorField2D phi;
    MatrixField2D dphi;
    double residual_sup = 0.0;  // sup |Phi(F(x)) - Lambda Phi(x)| over the grid
    int iterations = 0;
    bool converged = false;
    std::vector<double> cauchy_history;  // sup-norm Cauchy differences per step
    double rate_fit = 0.0;               // fitted tail ratio of the history
};

struct IterationOptions {
    double tol = 1e-10;
    int max_n = 200;
    // Radius outside of which the map is known to be linear; enables the
    // escape-based stopping rule for Siegel iterations (increments vanish
    // once the orbit leaves the support of the nonlinearity).
    double support_radius = 0.0;
    // Cauchy differences failing to decrease this many consecutive steps
    // declare divergence.
    int stall_limit = 20;
};

// Phi_n = Lambda^{-n} F^n on the grid, run to Cauchy tolerance. Divergence is
// reported through converged=false, not an exception; derivative divergence
// for alpha <= alpha0 shows up in the one-sided quotient tables instead.
ConjugacyResult linearize_poincare(const maps::PlanarMap& map, const GridSpec& grid,
                                   const IterationOptions& opt = {});

// Pointwise value of lim Lambda^{-n} F^n (exact evaluation, no grid).
Vec2 poincare_phi_at(const maps::PlanarMap& map, const Vec2& x,
                     const IterationOptions& opt = {});

// One-dimensional limit phi(x) = lim a_n(x)/lambda1^n computed as the ordered
// product of a_1 along the orbit; requires the flattened form
// (pi1 F(0,x2) = 0, pi2 F = lambda2 x2).
double differentiable_density_at(const maps::PlanarMap& map, const Vec2& x,
                                 const IterationOptions& opt = {});

// Phi(x) = (int_0^{x1} phi(t,x2) dt, x2) by composite Simpson.
Vec2 differentiable_phi_at(const maps::PlanarMap& map, const Vec2& x,
                           const IterationOptions& opt = {}, int quad_nodes = 64);

ConjugacyResult linearize_differentiable(const maps::PlanarMap& map,
                                         const GridSpec& grid,
                                         const IterationOptions& opt = {});

// Siegel two-sided limits: first component from backward iterates, second
// from forward iterates.
Vec2 siegel_phi_at(const maps::PlanarMap& map, const Vec2& x,
                   const IterationOptions& opt = {});
Mat2 siegel_dphi_at(const maps::PlanarMap& map, const Vec2& x,
                    const IterationOptions& opt = {});

ConjugacyResult linearize_siegel(const maps::PlanarMap& map, const GridSpec& grid,
                                 const IterationOptions& opt = {});

struct ResidualReport {
    double sup = 0.0;
    double interpolation_estimate = 0.0;  // grid-refinement Richardson estimate
    int excluded = 0;                     // image points outside the field
};

// sup over the grid of |phi(F(x)) - Lambda phi(x)| with phi interpolated.
ResidualReport conjugacy_residual(const VectorField2D& phi, const maps::PlanarMap& map,
                                  const GridSpec& grid);

struct QuotientRow {
    double level = 0.0;     // x2 offset from the axis
    double quotient = 0.0;  // [phi1(xi, level) - phi1(xi, 0)] / level
};

// One-sided difference quotients of a first-component evaluator at (xi, 0).
std::vector<QuotientRow> one_sided_quotients(
    const std::function<double(const Vec2&)>& phi1, double xi, bool from_above,
    const std::vector<double>& levels);

// First-component evaluator of the Poincare limit, for quotient tables.
std::function<double(const Vec2&)> poincare_phi1_evaluator(
    const maps::PlanarMap& map, const IterationOptions& opt = {});

struct IterationDiagnostics {
    std::vector<double> a_n;  // d(pi1 F^n)/dx1 at the probe
    std::vector<double> b_n;  // d(pi1 F^n)/dx2 at the probe
};

IterationDiagnostics derivative_diagnostics(const maps::PlanarMap& map,
                                            const Vec2& probe, int n_max);

}  // namespace hyperlin::conjugacy
