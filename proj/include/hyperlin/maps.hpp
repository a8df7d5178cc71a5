#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "hyperlin/geometry.hpp"
#include "hyperlin/spectral.hpp"

namespace hyperlin::maps {

// Smooth cutoff equal to 1 on the closed max-norm disk of radius
// inner_radius and 0 outside the disk of radius outer_radius.
struct BumpProfile {
    double inner_radius = 0.1;
    double outer_radius = 0.2;
    double eta_bound = 0.0;  // measured sup |DF(x) - Lambda| of the built map

    void validate() const;
};

// The kernel q(t) = exp(1/(t(t-1))) on (0,1) and its integral. The
// normalization is computed once by adaptive quadrature and cached together
// with a Gauss-Legendre prefix table for fast partial integrals.
class SmoothingKernel {
  public:
    explicit SmoothingKernel(double quadrature_tolerance = 1e-12);

    double normalization() const { return normalization_; }
    double quadrature_tolerance() const { return tol_; }

    static double q(double t);
    // int_0^t q, clamped to [0, normalization]
    double prefix(double t) const;

  private:
    double tol_;
    double normalization_;
    int panels_;
    std::vector<double> prefix_;  // integral up to each panel edge
};

const SmoothingKernel& shared_kernel();

// s^(1+alpha) on s >= 0, zero on s < 0; C^{1,alpha}.
double p_alpha(double s, double alpha);
double p_alpha_deriv(double s, double alpha);

// The transition function: 1 on {x1 >= |x2|}, 0 on {x1 <= 0}, smooth off the
// origin. Evaluation at the origin is a domain error.
double u_transition(double x1, double x2);
// Partial derivatives (zero outside the open transition cone).
Vec2 u_transition_grad(double x1, double x2);

double bump(const Vec2& x, const BumpProfile& profile);
Vec2 bump_grad(const Vec2& x, const BumpProfile& profile);

// An evaluable planar diffeomorphism with exact Jacobian and optional inverse.
struct PlanarMap {
    std::function<Vec2(const Vec2&)> eval;
    std::function<Mat2(const Vec2&)> jacobian;
    std::function<Vec2(const Vec2&)> inverse;  // may be empty
    Mat2 linear_part = Mat2::identity();
    bool x1_axis_invariant = false;
    bool x2_axis_invariant = false;
    double trust_radius = 2.0;

    bool has_inverse() const { return static_cast<bool>(inverse); }
    Vec2 operator()(const Vec2& x) const { return eval(x); }
};

PlanarMap linear_map(double lambda1, double lambda2);

// The planar family F(x) = (l1 x1 + rho(x) u(l1 x1, l2 x2) p_alpha(l2 x2),
// l2 x2). Defined for any hyperbolic eigenvalues; linear outside the first
// quadrant and outside the bump support.
PlanarMap make_axis_bump_map(const spectral::SpectralParams& params,
                             const BumpProfile& profile);

// Domain-checked constructors for the two counterexample families.
PlanarMap make_poincare_counterexample(const spectral::SpectralParams& params,
                                       const BumpProfile& profile);
// G = (x1/l1, x2/l2 + rho(x) u(x2/l2, x1/l1) p_alpha(x1/l1)); returns G^{-1}.
PlanarMap make_siegel_counterexample(const spectral::SpectralParams& params,
                                     const BumpProfile& profile);

// n-fold composition (negative n uses the inverse). Iterates leaving the
// trust region abort with the escape step in the message.
Vec2 iterate(const PlanarMap& map, Vec2 x, int n);
Mat2 jacobian_of_iterate(const PlanarMap& map, Vec2 x, int n);

Mat2 finite_difference_jacobian(const PlanarMap& map, const Vec2& x, double h);

// Measured sup |DF(x) - Lambda| over a sample of the bump support.
double measure_eta(const PlanarMap& map, const BumpProfile& profile,
                   int samples_per_axis = 161);

// Conjugation helpers used by the flattening pipeline.
PlanarMap conjugate(const PlanarMap& theta, const PlanarMap& f,
                    const PlanarMap& theta_inv);
PlanarMap swap_axes(const PlanarMap& f);
PlanarMap invert(const PlanarMap& f);

}  // namespace hyperlin::maps
