#include "hyperlin/conjugacy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperlin/numerics.hpp"

namespace hyperlin::conjugacy {

namespace {

Vec2 scale_components(const Vec2& v, double s1, double s2) {
    return {v.x1 * s1, v.x2 * s2};
}

}  // namespace

ConjugacyResult linearize_poincare(const maps::PlanarMap& map, const GridSpec& grid,
                                   const IterationOptions& opt) {
    grid.validate();
    const double l1 = map.linear_part.a11, l2 = map.linear_part.a22;
    ConjugacyResult out;
    out.phi = VectorField2D(grid);
    out.dphi = MatrixField2D(grid);

    const std::size_t m = grid.size();
    std::vector<Vec2> z(m);
    std::vector<Mat2> J(m, Mat2::identity());
    std::vector<Vec2> phi(m), phi_prev(m);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) z[grid.index(i, j)] = grid.point(i, j);
    phi = z;

    double s1 = 1.0, s2 = 1.0;
    int stall = 0;
    double prev_diff = std::numeric_limits<double>::infinity();
    int n = 0;
    bool converged = false;
    for (n = 1; n <= opt.max_n; ++n) {
        s1 /= l1;
        s2 /= l2;
        double diff = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            J[k] = map.jacobian(z[k]) * J[k];
            z[k] = map.eval(z[k]);
            if (max_norm(z[k]) > map.trust_radius)
                throw NumericError("linearize_poincare: iterate escaped at step " +
                                   std::to_string(n));
            phi_prev[k] = phi[k];
            phi[k] = scale_components(z[k], s1, s2);
            diff = std::max(diff, max_norm(phi[k] - phi_prev[k]));
        }
        out.cauchy_history.push_back(diff);
        if (diff < opt.tol) {
            converged = true;
            break;
        }
        stall = diff >= prev_diff ? stall + 1 : 0;
        prev_diff = diff;
        if (stall >= opt.stall_limit) break;  // value sequence not settling
    }
    out.iterations = std::min(n, opt.max_n);
    out.converged = converged;
    out.rate_fit = num::fit_tail_ratio(out.cauchy_history);

    // residual of the returned iterate, evaluated through the exact identity
    // Phi_n(F(x)) = Lambda Phi_{n+1}(x): one extra step per point.
    double res = 0.0;
    const double t1 = s1 / l1, t2 = s2 / l2;
    for (std::size_t k = 0; k < m; ++k) {
        const Vec2 znext = map.eval(z[k]);
        const Vec2 phi_next = scale_components(znext, t1, t2);
        res = std::max(res, max_norm(map.linear_part * (phi_next - phi[k])));
        out.phi.values[k] = phi[k];
    }
    out.residual_sup = res;
    for (std::size_t k = 0; k < m; ++k) {
        Mat2 d = J[k];
        d.a11 *= s1;
        d.a12 *= s1;
        d.a21 *= s2;
        d.a22 *= s2;
        out.dphi.values[k] = d;
    }
    return out;
}

Vec2 poincare_phi_at(const maps::PlanarMap& map, const Vec2& x,
                     const IterationOptions& opt) {
    const double l1 = map.linear_part.a11, l2 = map.linear_part.a22;
    Vec2 z = x, cur = x;
    double s1 = 1.0, s2 = 1.0;
    for (int n = 1; n <= opt.max_n; ++n) {
        z = map.eval(z);
        s1 /= l1;
        s2 /= l2;
        const Vec2 next{z.x1 * s1, z.x2 * s2};
        const double diff = max_norm(next - cur);
        cur = next;
        if (diff < opt.tol && n >= 3) break;
    }
    return cur;
}

double differentiable_density_at(const maps::PlanarMap& map, const Vec2& x,
                                 const IterationOptions& opt) {
    const double l1 = map.linear_part.a11;
    Vec2 z = x;
    double prod = 1.0, prev = 1.0;
    int grow = 0;
    double last_diff = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= opt.max_n; ++n) {
        prod *= map.jacobian(z).a11 / l1;
        z = map.eval(z);
        const double diff = std::abs(prod - prev);
        prev = prod;
        if (diff < opt.tol && n >= 3) return prod;
        grow = diff > last_diff ? grow + 1 : 0;
        last_diff = diff;
        if (grow >= opt.stall_limit || !std::isfinite(prod))
            throw NumericError(
                "differentiable_density_at: geometric decay of the derivative "
                "product failed at step " +
                std::to_string(n));
    }
    return prod;
}

Vec2 differentiable_phi_at(const maps::PlanarMap& map, const Vec2& x,
                           const IterationOptions& opt, int quad_nodes) {
    auto f = [&](double t) { return differentiable_density_at(map, {t, x.x2}, opt); };
    return {num::simpson(f, 0.0, x.x1, quad_nodes), x.x2};
}

ConjugacyResult linearize_differentiable(const maps::PlanarMap& map,
                                         const GridSpec& grid,
                                         const IterationOptions& opt) {
    grid.validate();
    const double l1 = map.linear_part.a11;
    ConjugacyResult out;
    out.phi = VectorField2D(grid);
    out.dphi = MatrixField2D(grid);

    const std::size_t m = grid.size();
    std::vector<Vec2> z(m);
    std::vector<double> prod(m, 1.0), prev(m, 1.0);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) z[grid.index(i, j)] = grid.point(i, j);

    int n = 0;
    bool converged = false;
    double prev_diff = std::numeric_limits<double>::infinity();
    int grow = 0;
    for (n = 1; n <= opt.max_n; ++n) {
        double diff = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            prod[k] *= map.jacobian(z[k]).a11 / l1;
            z[k] = map.eval(z[k]);
            diff = std::max(diff, std::abs(prod[k] - prev[k]));
            prev[k] = prod[k];
        }
        out.cauchy_history.push_back(diff);
        if (diff < opt.tol && n >= 3) {
            converged = true;
            break;
        }
        grow = diff > prev_diff ? grow + 1 : 0;
        prev_diff = diff;
        if (grow >= opt.stall_limit)
            throw NumericError(
                "linearize_differentiable: derivative product diverged at step " +
                std::to_string(n));
    }
    out.iterations = std::min(n, opt.max_n);
    out.converged = converged;
    out.rate_fit = num::fit_tail_ratio(out.cauchy_history);

    // integrate the density along grid rows outward from the x2-axis
    const int c = (grid.n - 1) / 2;
    const double h = grid.spacing();
    for (int j = 0; j < grid.n; ++j) {
        std::vector<double> acc(grid.n, 0.0);
        auto dens = [&](int i) { return prod[grid.index(i, j)]; };
        for (int i = c + 1; i <= grid.n - 1; ++i) {
            if (i - 1 >= c + 1 && (i - c) % 2 == 0)
                acc[i] = acc[i - 2] + h / 3.0 * (dens(i - 2) + 4.0 * dens(i - 1) + dens(i));
            else
                acc[i] = acc[i - 1] + 0.5 * h * (dens(i - 1) + dens(i));
        }
        for (int i = c - 1; i >= 0; --i) {
            if (i + 1 <= c - 1 && (c - i) % 2 == 0)
                acc[i] = acc[i + 2] - h / 3.0 * (dens(i + 2) + 4.0 * dens(i + 1) + dens(i));
            else
                acc[i] = acc[i + 1] - 0.5 * h * (dens(i + 1) + dens(i));
        }
        for (int i = 0; i < grid.n; ++i) {
            const std::size_t k = grid.index(i, j);
            out.phi.values[k] = {acc[i], grid.coord(j)};
        }
    }
    // derivative field: a11 is the density, a12 by central differences
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const std::size_t k = grid.index(i, j);
            Mat2 d = Mat2::identity();
            d.a11 = prod[k];
            const int jm = std::max(0, j - 1), jp = std::min(grid.n - 1, j + 1);
            d.a12 = (out.phi.at(i, jp).x1 - out.phi.at(i, jm).x1) / ((jp - jm) * h);
            out.dphi.values[k] = d;
        }
    }
    out.residual_sup = conjugacy_residual(out.phi, map, grid).sup;
    return out;
}

// ---------------------------------------------------------------------------
// Siegel limits

namespace {

struct SiegelComponent {
    double value = 0.0;
    Vec2 grad{0.0, 0.0};
    int steps = 0;
    bool converged = false;
};

// Shared driver: forward=false runs the inverse orbit. Extracts component
// `comp` (0 or 1) scaled by lambda^{-n} (forward) or lambda^{n} (backward).
SiegelComponent siegel_limit(const maps::PlanarMap& map, const Vec2& x, int comp,
                             bool forward, const IterationOptions& opt) {
    if (!forward && !map.has_inverse())
        throw std::domain_error("linearize_siegel: inverse unavailable");
    const double lam = comp == 0 ? map.linear_part.a11 : map.linear_part.a22;
    Vec2 z = x;
    Mat2 M = Mat2::identity();
    double scale = 1.0;
    SiegelComponent out;
    double prev_val = comp == 0 ? x.x1 : x.x2;
    Vec2 prev_grad = comp == 0 ? Vec2{1, 0} : Vec2{0, 1};
    int quiet = 0;
    for (int n = 1; n <= opt.max_n; ++n) {
        if (forward) {
            M = map.jacobian(z) * M;
            z = map.eval(z);
            scale /= lam;
        } else {
            z = map.inverse(z);
            M = map.jacobian(z).inverse() * M;
            scale *= lam;
        }
        const double val = scale * (comp == 0 ? z.x1 : z.x2);
        const Vec2 grad = comp == 0 ? Vec2{scale * M.a11, scale * M.a12}
                                    : Vec2{scale * M.a21, scale * M.a22};
        const double diff =
            std::max(std::abs(val - prev_val), max_norm(grad - prev_grad));
        prev_val = val;
        prev_grad = grad;
        out.steps = n;
        const bool escaped =
            opt.support_radius > 0 && max_norm(z) > opt.support_radius;
        quiet = diff < opt.tol ? quiet + 1 : 0;
        if ((escaped && quiet >= 2) || (opt.support_radius == 0 && quiet >= 3)) {
            out.converged = true;
            break;
        }
        if (max_norm(z) > map.trust_radius)
            throw NumericError("linearize_siegel: orbit left the trust region at step " +
                               std::to_string(n) + " before the limit settled");
    }
    out.value = prev_val;
    out.grad = prev_grad;
    return out;
}

}  // namespace

Vec2 siegel_phi_at(const maps::PlanarMap& map, const Vec2& x,
                   const IterationOptions& opt) {
    const SiegelComponent c1 = siegel_limit(map, x, 0, /*forward=*/false, opt);
    const SiegelComponent c2 = siegel_limit(map, x, 1, /*forward=*/true, opt);
    return {c1.value, c2.value};
}

Mat2 siegel_dphi_at(const maps::PlanarMap& map, const Vec2& x,
                    const IterationOptions& opt) {
    const SiegelComponent c1 = siegel_limit(map, x, 0, /*forward=*/false, opt);
    const SiegelComponent c2 = siegel_limit(map, x, 1, /*forward=*/true, opt);
    return {c1.grad.x1, c1.grad.x2, c2.grad.x1, c2.grad.x2};
}

ConjugacyResult linearize_siegel(const maps::PlanarMap& map, const GridSpec& grid,
                                 const IterationOptions& opt) {
    grid.validate();
    ConjugacyResult out;
    out.phi = VectorField2D(grid);
    out.dphi = MatrixField2D(grid);
    int max_steps = 0;
    bool all_converged = true;
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const Vec2 x = grid.point(i, j);
            const SiegelComponent c1 = siegel_limit(map, x, 0, false, opt);
            const SiegelComponent c2 = siegel_limit(map, x, 1, true, opt);
            out.phi.at(i, j) = {c1.value, c2.value};
            out.dphi.at(i, j) = {c1.grad.x1, c1.grad.x2, c2.grad.x1, c2.grad.x2};
            max_steps = std::max({max_steps, c1.steps, c2.steps});
            all_converged = all_converged && c1.converged && c2.converged;
        }
    }
    out.iterations = max_steps;
    out.converged = all_converged;

    // equivariance residual by pointwise re-evaluation at F(x)
    double res = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const Vec2 x = grid.point(i, j);
            const Vec2 lhs = siegel_phi_at(map, map.eval(x), opt);
            const Vec2 rhs = map.linear_part * out.phi.at(i, j);
            res = std::max(res, max_norm(lhs - rhs));
        }
    }
    out.residual_sup = res;
    out.cauchy_history.push_back(res);
    out.rate_fit = 0.0;
    return out;
}

ResidualReport conjugacy_residual(const VectorField2D& phi, const maps::PlanarMap& map,
                                  const GridSpec& grid) {
    ResidualReport rep;
    const GridSpec fine = phi.grid;
    // Richardson-style interpolation estimate: compare bilinear values on the
    // coarsened grid against stored ones at midpoints.
    double interp = 0.0;
    for (int i = 1; i + 1 < fine.n; i += 2) {
        for (int j = 1; j + 1 < fine.n; j += 2) {
            const Vec2 mid = (phi.at(i - 1, j - 1) + phi.at(i + 1, j + 1)) * 0.5;
            interp = std::max(interp, max_norm(mid - phi.at(i, j)));
        }
    }
    rep.interpolation_estimate = interp;
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const Vec2 x = grid.point(i, j);
            if (!phi.contains(x)) {
                ++rep.excluded;
                continue;
            }
            const Vec2 fx = map.eval(x);
            if (!phi.contains(fx)) {
                ++rep.excluded;
                continue;
            }
            const Vec2 lhs = phi.interpolate(fx);
            const Vec2 rhs = map.linear_part * phi.interpolate(x);
            rep.sup = std::max(rep.sup, max_norm(lhs - rhs));
        }
    }
    return rep;
}

std::vector<QuotientRow> one_sided_quotients(
    const std::function<double(const Vec2&)>& phi1, double xi, bool from_above,
    const std::vector<double>& levels) {
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (!(levels[i + 1] < levels[i]))
            throw std::invalid_argument("one_sided_quotients: levels must decrease to 0");
    if (!levels.empty() && levels.back() <= 0.0)
        throw std::invalid_argument("one_sided_quotients: levels must stay positive");
    const double base = phi1({xi, 0.0});
    std::vector<QuotientRow> rows;
    rows.reserve(levels.size());
    for (double lv : levels) {
        const double x2 = from_above ? lv : -lv;
        rows.push_back({lv, (phi1({xi, x2}) - base) / x2});
    }
    return rows;
}

std::function<double(const Vec2&)> poincare_phi1_evaluator(
    const maps::PlanarMap& map, const IterationOptions& opt) {
    return [map, opt](const Vec2& x) { return poincare_phi_at(map, x, opt).x1; };
}

IterationDiagnostics derivative_diagnostics(const maps::PlanarMap& map,
                                            const Vec2& probe, int n_max) {
    IterationDiagnostics d;
    Vec2 z = probe;
    Mat2 M = Mat2::identity();
    for (int n = 1; n <= n_max; ++n) {
        M = map.jacobian(z) * M;
        z = map.eval(z);
        d.a_n.push_back(M.a11);
        d.b_n.push_back(M.a12);
    }
    return d;
}

}  // namespace hyperlin::conjugacy
