#pragma once

#include <string>

#include "hyperlin/conjugacy.hpp"
#include "hyperlin/geometry.hpp"
#include "hyperlin/maps.hpp"
#include "hyperlin/numerics.hpp"

namespace hyperlin::manifolds {

struct PsiOptions {
    double tol = 1e-10;
    int max_n = 400;
};

// psi(x) = lim lambda2^{-n} pi2 F^n(x), pointwise.
double psi_at(const maps::PlanarMap& map, const Vec2& x, const PsiOptions& opt = {});
// gradient of psi by the Jacobian-row limit
Vec2 psi_grad_at(const maps::PlanarMap& map, const Vec2& x, const PsiOptions& opt = {});

// Sampled psi with the functional identity psi(F(x)) = lambda2 psi(x)
// verified on the grid; throws when the Cauchy differences fail to decay
// geometrically (eta too large), reporting the measured ratio.
struct PsiField {
    ScalarField2D field;
    double identity_residual = 0.0;
    double rate = 0.0;
    int iterations = 0;
};
PsiField compute_psi(const maps::PlanarMap& map, const GridSpec& grid,
                     const PsiOptions& opt = {});

struct InvariantGraph {
    num::LinearInterp g;  // x1 = g(x2); zero outside the table
    double invariance_defect = 0.0;
    double dg0 = 0.0;
    int iterations = 0;
    double contraction_ratio = 0.0;

    double eval(double s) const {
        return std::abs(s) > g.radius ? 0.0 : g(s);
    }
    // smoothed derivative (central difference at the table spacing)
    double deriv(double s) const {
        const double h = g.spacing();
        return (eval(s + h) - eval(s - h)) / (2.0 * h);
    }
};

struct GraphOptions {
    double radius = 0.4;  // table half-width; graphs vanish outside the bump
    int nodes = 401;
    double tol = 1e-10;
    int max_iter = 400;
};

// Fixed point of the pull-back graph transform g(s) <- pi1 F(g(s/l2), s/l2)
// for maps with linear second component. Undamped; contraction is checked
// and a failure at the configured radius is a hard error.
InvariantGraph compute_invariant_graph(const maps::PlanarMap& map,
                                       const GraphOptions& opt = {});

struct FlatteningResult {
    maps::PlanarMap flat;       // Theta o F o Theta^{-1}
    maps::PlanarMap theta;      // Theta = Theta2 o Theta1
    maps::PlanarMap theta_inv;  // exact inverse of Theta
    InvariantGraph graph;
    std::string provenance;
    // residuals of pi1 F~(0,x2) = 0 and pi2 F~(x) = l2 x2 on a sample
    double axis_residual = 0.0;
    double linearity_residual = 0.0;
};

// Conjugates a contraction into the form pi1 F~(0,x2) = 0, pi2 F~ = l2 x2
// via Theta1 = (x1, psi) and the graph shear Theta2 = (x1 - g(x2), x2).
FlatteningResult flatten_poincare(const maps::PlanarMap& map,
                                  const PsiOptions& psi_opt = {},
                                  const GraphOptions& graph_opt = {});

struct StraightenResult {
    maps::PlanarMap straightened;
    maps::PlanarMap theta;
    maps::PlanarMap theta_inv;
    InvariantGraph unstable;  // x1 = g(x2)
    InvariantGraph stable;    // x2 = h(x1), stored in the same table form
    double axis_residual = 0.0;
};

// Moves the stable/unstable manifolds of a saddle onto the coordinate axes
// (graph transforms on F and F^{-1}); result satisfies pi1 F(0,x2) = 0 and
// pi2 F(x1,0) = 0 up to the reported residual.
StraightenResult straighten_siegel_axes(const maps::PlanarMap& map,
                                        const GraphOptions& opt = {});

}  // namespace hyperlin::manifolds
