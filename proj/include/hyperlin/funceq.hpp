#pragma once

#include <functional>
#include <vector>

#include "hyperlin/maps.hpp"
#include "hyperlin/numerics.hpp"

namespace hyperlin::funceq {

// Sampled function on a symmetric interval with its measured Holder seminorm.
struct AxisFunction {
    num::LinearInterp table;
    double alpha = 1.0;
    double holder_seminorm = 0.0;

    double operator()(double s) const { return table(s); }
    double radius() const { return table.radius; }
};

double measure_holder_seminorm(const std::function<double(double)>& fn,
                               double radius, double alpha, int nodes = 257);

// Scalar data along the contracting axis: the axis diffeomorphism f and the
// derivative entries of the map there. All closures are global functions.
struct AxisCoefficients {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double alpha = 1.0;
    std::function<double(double)> f;    // axis restriction, f(0)=0, Df(0)=lambda1
    std::function<double(double)> a11;  // = Df
    std::function<double(double)> a12;
    std::function<double(double)> a22;

    double f_inverse(double s) const;  // monotone bisection
};

// Derivative coefficients of `map` along its x1-axis.
AxisCoefficients coefficients_from_map(const maps::PlanarMap& map, double alpha);

struct SolveOptions {
    double radius = 0.1;  // solve interval half-width (halved on demand)
    int nodes = 1025;
    double tol = 1e-12;
    int max_iter = 400;
    int max_halvings = 6;
};

struct SolveReport {
    AxisFunction solution;
    std::vector<double> seminorm_history;  // E-seminorm of successive differences
    double measured_ratio = 0.0;
    double theory_ratio = 0.0;
    double equation_residual = 0.0;  // sup residual of the source equation on nodes
    int iterations = 0;
    double final_radius = 0.0;
    int halvings = 0;
};

enum class DiagonalKind { P11, P22 };  // which diagonal equation to solve

// Fixed point of the reweighting operator for the diagonal equations
// a(s) p(f(s)) = lambda p(s), iterated from p == 1 (ptilde == 0).
SolveReport solve_fe_diag(const AxisCoefficients& coeffs, DiagonalKind kind,
                          const SolveOptions& opt = {});

// Off-diagonal equation a22(s) p12(f(s)) = lambda1 p12(s) - a12(s) p11(f(s)),
// solved along the expanding inverse orbit in the compact-support space.
SolveReport solve_fe_offdiag(const AxisCoefficients& coeffs,
                             const AxisFunction& p11, const SolveOptions& opt = {});

struct AxisJets {
    AxisFunction j11, joff, j22;  // p11,p12,p22 on x1; q11,q21,q22 on x2
};

struct AxisSystemResult {
    AxisJets jets;
    SolveReport diag_first, diag_second, offdiag;
    double matrix_identity_residual = 0.0;  // D Psi(F(.)) DF(.) = Lambda D Psi(.)
};

enum class Axis { X1, X2 };

// Extracts coefficients along the requested axis and runs the three solves;
// the x2-axis system reduces to the x1-axis system of the swapped inverse.
AxisSystemResult solve_axis_system(const maps::PlanarMap& map, Axis axis,
                                   double alpha, const SolveOptions& opt = {});

struct ContractionDiagnostics {
    double measured_ratio = 0.0;
    double theory_ratio = 0.0;
    std::vector<double> history;
};

ContractionDiagnostics contraction_diagnostics(const SolveReport& report);

}  // namespace hyperlin::funceq
