#include "hyperlin/funceq.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperlin::funceq {

double measure_holder_seminorm(const std::function<double(double)>& fn,
                               double radius, double alpha, int nodes) {
    std::vector<double> vals(nodes);
    const double h = 2.0 * radius / (nodes - 1);
    for (int i = 0; i < nodes; ++i) vals[i] = fn(-radius + h * i);
    double sup = 0.0;
    // adjacent pairs at every scale: stride doubling keeps it O(n log n)
    for (int stride = 1; stride < nodes; stride *= 2) {
        for (int i = 0; i + stride < nodes; ++i) {
            const double d = stride * h;
            sup = std::max(sup, std::abs(vals[i + stride] - vals[i]) / std::pow(d, alpha));
        }
    }
    return sup;
}

double AxisCoefficients::f_inverse(double s) const {
    // bisection is orientation-agnostic; f is monotone with slope near lambda1
    const double b = std::abs(s) / std::min(1.0, std::abs(lambda1)) + 1.0;
    return num::solve_bracketed([&](double t) { return f(t) - s; }, -b, b, 1e-14);
}

AxisCoefficients coefficients_from_map(const maps::PlanarMap& map, double alpha) {
    AxisCoefficients c;
    c.lambda1 = map.linear_part.a11;
    c.lambda2 = map.linear_part.a22;
    c.alpha = alpha;
    c.f = [map](double s) { return map.eval({s, 0.0}).x1; };
    c.a11 = [map](double s) { return map.jacobian({s, 0.0}).a11; };
    c.a12 = [map](double s) { return map.jacobian({s, 0.0}).a12; };
    c.a22 = [map](double s) { return map.jacobian({s, 0.0}).a22; };
    return c;
}

namespace {

// E-space seminorm of a table: Holder quotient over strided node pairs.
double table_seminorm(const std::vector<double>& v, double h, double alpha) {
    double sup = 0.0;
    const int n = static_cast<int>(v.size());
    for (int stride = 1; stride < n; stride *= 2) {
        const double dpow = std::pow(stride * h, alpha);
        for (int i = 0; i + stride < n; ++i)
            sup = std::max(sup, std::abs(v[i + stride] - v[i]) / dpow);
    }
    return sup;
}

struct IterationOutcome {
    std::vector<double> fixed_point;
    std::vector<double> seminorm_history;
    int iterations = 0;
    bool contracting = true;
};

// Generic fixed-point driver on a table over [-radius, radius].
IterationOutcome run_iteration(
    const std::function<double(const num::LinearInterp&, double)>& apply,
    double radius, int nodes, double alpha, double tol, int max_iter) {
    IterationOutcome out;
    const double h = 2.0 * radius / (nodes - 1);
    num::LinearInterp cur{radius, std::vector<double>(nodes, 0.0)};
    std::vector<double> next(nodes, 0.0), diff(nodes, 0.0);
    int worse = 0;
    double prev_sem = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < nodes; ++i) {
            const double s = -radius + h * i;
            next[i] = apply(cur, s);
            diff[i] = next[i] - cur.y[i];
        }
        cur.y = next;
        double supv = 0.0;
        for (double d : diff) supv = std::max(supv, std::abs(d));
        const double sem = std::max(table_seminorm(diff, h, alpha), supv);
        out.seminorm_history.push_back(sem);
        out.iterations = it;
        if (sem < tol) break;
        if (sem >= prev_sem) {
            if (++worse >= 10) {
                out.contracting = false;
                break;
            }
        } else {
            worse = 0;
        }
        prev_sem = sem;
    }
    out.fixed_point = cur.y;
    return out;
}

}  // namespace

SolveReport solve_fe_diag(const AxisCoefficients& coeffs, DiagonalKind kind,
                          const SolveOptions& opt) {
    const double lambda = kind == DiagonalKind::P11 ? coeffs.lambda1 : coeffs.lambda2;
    const auto& a = kind == DiagonalKind::P11 ? coeffs.a11 : coeffs.a22;
    SolveReport rep;
    rep.theory_ratio = std::pow(std::abs(coeffs.lambda1), coeffs.alpha);

    double radius = opt.radius;
    for (int halved = 0; halved <= opt.max_halvings; ++halved) {
        auto apply = [&](const num::LinearInterp& ptilde, double s) {
            const double A = a(s) / lambda;
            return A * ptilde(coeffs.f(s)) + A - 1.0;
        };
        IterationOutcome o =
            run_iteration(apply, radius, opt.nodes, coeffs.alpha, opt.tol, opt.max_iter);
        rep.halvings = halved;
        rep.final_radius = radius;
        rep.iterations = o.iterations;
        rep.seminorm_history = o.seminorm_history;
        rep.measured_ratio = num::fit_tail_ratio(o.seminorm_history);
        if (!o.contracting) {
            radius *= 0.5;
            continue;
        }
        std::vector<double> p(o.fixed_point.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = 1.0 + o.fixed_point[i];
        rep.solution.table = num::LinearInterp{radius, p};
        rep.solution.alpha = coeffs.alpha;
        rep.solution.holder_seminorm = measure_holder_seminorm(
            [&](double s) { return rep.solution.table(s); }, radius, coeffs.alpha);
        // residual of the source equation a(s) p(f(s)) = lambda p(s)
        double res = 0.0;
        const double h = 2.0 * radius / (opt.nodes - 1);
        for (int i = 0; i < opt.nodes; ++i) {
            const double s = -radius + h * i;
            res = std::max(res, std::abs(a(s) * rep.solution(coeffs.f(s)) -
                                         lambda * rep.solution(s)));
        }
        rep.equation_residual = res;
        return rep;
    }
    throw NumericError("solve_fe_diag: operator not contracting, measured factor " +
                       std::to_string(rep.measured_ratio) + " at radius " +
                       std::to_string(rep.final_radius));
}

SolveReport solve_fe_offdiag(const AxisCoefficients& coeffs,
                             const AxisFunction& p11, const SolveOptions& opt) {
    SolveReport rep;
    rep.theory_ratio = std::pow(std::abs(coeffs.lambda1), 1.0 - coeffs.alpha) /
                       std::abs(coeffs.lambda2);

    double radius = opt.radius;
    for (int halved = 0; halved <= opt.max_halvings; ++halved) {
        auto apply = [&](const num::LinearInterp& p12, double s) {
            const double sf = coeffs.f_inverse(s);
            const double a22f = coeffs.a22(sf);
            double carry = 0.0;
            if (std::abs(sf) <= radius) carry = p12(sf);  // compact support in J
            return coeffs.lambda1 / a22f * carry - coeffs.a12(sf) * p11(s) / a22f;
        };
        IterationOutcome o =
            run_iteration(apply, radius, opt.nodes, coeffs.alpha, opt.tol, opt.max_iter);
        rep.halvings = halved;
        rep.final_radius = radius;
        rep.iterations = o.iterations;
        rep.seminorm_history = o.seminorm_history;
        rep.measured_ratio = num::fit_tail_ratio(o.seminorm_history);
        if (!o.contracting) {
            radius *= 0.5;
            continue;
        }
        rep.solution.table = num::LinearInterp{radius, o.fixed_point};
        rep.solution.alpha = coeffs.alpha;
        rep.solution.holder_seminorm = measure_holder_seminorm(
            [&](double s) { return rep.solution.table(s); }, radius, coeffs.alpha);
        double res = 0.0;
        const double h = 2.0 * radius / (opt.nodes - 1);
        for (int i = 0; i < opt.nodes; ++i) {
            const double s = -radius + h * i;
            const double fs = coeffs.f(s);
            const double lhs = coeffs.a22(s) * rep.solution(fs);
            const double rhs =
                coeffs.lambda1 * rep.solution(s) - coeffs.a12(s) * p11(fs);
            res = std::max(res, std::abs(lhs - rhs));
        }
        rep.equation_residual = res;
        return rep;
    }
    throw NumericError("solve_fe_offdiag: operator not contracting, measured factor " +
                       std::to_string(rep.measured_ratio));
}

AxisSystemResult solve_axis_system(const maps::PlanarMap& map, Axis axis,
                                   double alpha, const SolveOptions& opt) {
    if (axis == Axis::X2) {
        // the x2-axis system of F is the x1-axis system of swap o F^{-1} o swap
        const maps::PlanarMap mirrored = maps::swap_axes(maps::invert(map));
        AxisSystemResult sub = solve_axis_system(mirrored, Axis::X1, alpha, opt);
        AxisSystemResult out;
        out.jets.j11 = sub.jets.j22;   // q11
        out.jets.joff = sub.jets.joff; // q21
        out.jets.j22 = sub.jets.j11;   // q22
        out.diag_first = sub.diag_second;
        out.diag_second = sub.diag_first;
        out.offdiag = sub.offdiag;
        // verify the x2-axis matrix identity directly on samples
        double res = 0.0;
        const double r = out.jets.j11.radius();
        for (int i = -16; i <= 16; ++i) {
            const double s = r * 0.5 * i / 16.0;
            const Vec2 im = map.eval({0.0, s});
            const Mat2 df = map.jacobian({0.0, s});
            const Mat2 dpsi_s{out.jets.j11(s), 0.0, out.jets.joff(s), out.jets.j22(s)};
            const Mat2 dpsi_f{out.jets.j11(im.x2), 0.0, out.jets.joff(im.x2),
                              out.jets.j22(im.x2)};
            const Mat2 lhs = dpsi_f * df;
            const Mat2 rhs = map.linear_part * dpsi_s;
            res = std::max(res, op_norm(lhs - rhs));
        }
        out.matrix_identity_residual = res;
        return out;
    }

    AxisCoefficients coeffs = coefficients_from_map(map, alpha);
    AxisSystemResult out;
    out.diag_first = solve_fe_diag(coeffs, DiagonalKind::P11, opt);
    out.diag_second = solve_fe_diag(coeffs, DiagonalKind::P22, opt);
    out.offdiag = solve_fe_offdiag(coeffs, out.diag_first.solution, opt);
    out.jets.j11 = out.diag_first.solution;
    out.jets.j22 = out.diag_second.solution;
    out.jets.joff = out.offdiag.solution;

    double res = 0.0;
    const double r = out.jets.j11.radius();
    for (int i = -16; i <= 16; ++i) {
        const double s = r * 0.5 * i / 16.0;
        const double fs = coeffs.f(s);
        const Mat2 df = map.jacobian({s, 0.0});
        const Mat2 dpsi_s{out.jets.j11(s), out.jets.joff(s), 0.0, out.jets.j22(s)};
        const Mat2 dpsi_f{out.jets.j11(fs), out.jets.joff(fs), 0.0, out.jets.j22(fs)};
        const Mat2 lhs = dpsi_f * df;
        const Mat2 rhs = map.linear_part * dpsi_s;
        res = std::max(res, op_norm(lhs - rhs));
    }
    out.matrix_identity_residual = res;
    return out;
}

ContractionDiagnostics contraction_diagnostics(const SolveReport& report) {
    if (report.seminorm_history.size() < 3)
        throw std::invalid_argument("contraction_diagnostics: need >= 3 iterations");
    return {report.measured_ratio, report.theory_ratio, report.seminorm_history};
}

}  // namespace hyperlin::funceq
