#include "hyperlin/manifolds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperlin::manifolds {

double psi_at(const maps::PlanarMap& map, const Vec2& x, const PsiOptions& opt) {
    const double l2 = map.linear_part.a22;
    Vec2 z = x;
    double scale = 1.0, cur = x.x2;
    for (int n = 1; n <= opt.max_n; ++n) {
        z = map.eval(z);
        scale /= l2;
        const double next = scale * z.x2;
        const double diff = std::abs(next - cur);
        cur = next;
        if (diff < opt.tol && n >= 3) break;
    }
    return cur;
}

Vec2 psi_grad_at(const maps::PlanarMap& map, const Vec2& x, const PsiOptions& opt) {
    const double l2 = map.linear_part.a22;
    Vec2 z = x;
    Mat2 M = Mat2::identity();
    double scale = 1.0;
    Vec2 cur{0.0, 1.0};
    for (int n = 1; n <= opt.max_n; ++n) {
        M = map.jacobian(z) * M;
        z = map.eval(z);
        scale /= l2;
        const Vec2 next{scale * M.a21, scale * M.a22};
        const double diff = max_norm(next - cur);
        cur = next;
        if (diff < opt.tol && n >= 3) break;
    }
    return cur;
}

PsiField compute_psi(const maps::PlanarMap& map, const GridSpec& grid,
                     const PsiOptions& opt) {
    grid.validate();
    const double l2 = map.linear_part.a22;
    PsiField out;
    out.field = ScalarField2D(grid);

    const std::size_t m = grid.size();
    std::vector<Vec2> z(m);
    std::vector<double> cur(m);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            z[grid.index(i, j)] = grid.point(i, j);
            cur[grid.index(i, j)] = grid.point(i, j).x2;
        }

    std::vector<double> history;
    double scale = 1.0;
    for (int n = 1; n <= opt.max_n; ++n) {
        scale /= l2;
        double diff = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            z[k] = map.eval(z[k]);
            const double next = scale * z[k].x2;
            diff = std::max(diff, std::abs(next - cur[k]));
            cur[k] = next;
        }
        history.push_back(diff);
        out.iterations = n;
        if (diff < opt.tol && n >= 3) break;
    }
    out.rate = num::fit_tail_ratio(history);
    if (history.back() >= opt.tol && out.rate >= 1.0)
        throw NumericError("compute_psi: no geometric decay, measured ratio " +
                           std::to_string(out.rate));
    out.field.values = cur;

    double res = 0.0;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            const Vec2 x = grid.point(i, j);
            res = std::max(res, std::abs(psi_at(map, map.eval(x), opt) -
                                         l2 * out.field.at(i, j)));
        }
    out.identity_residual = res;
    return out;
}

InvariantGraph compute_invariant_graph(const maps::PlanarMap& map,
                                       const GraphOptions& opt) {
    const double l2 = map.linear_part.a22;
    InvariantGraph out;
    out.g.radius = opt.radius;
    out.g.y.assign(opt.nodes, 0.0);

    auto eval_g = [&](const std::vector<double>& tab, double s) -> double {
        if (std::abs(s) > opt.radius) return 0.0;
        num::LinearInterp li{opt.radius, tab};
        return li(s);
    };

    std::vector<double> tab(opt.nodes, 0.0), next(opt.nodes, 0.0);
    const double h = 2.0 * opt.radius / (opt.nodes - 1);
    double prev_delta = std::numeric_limits<double>::infinity();
    int noncontract = 0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        double delta = 0.0;
        for (int i = 0; i < opt.nodes; ++i) {
            const double s = -opt.radius + h * i;
            const double base = s / l2;
            next[i] = map.eval({eval_g(tab, base), base}).x1;
            delta = std::max(delta, std::abs(next[i] - tab[i]));
        }
        tab.swap(next);
        out.iterations = it;
        if (delta < opt.tol) break;
        if (delta >= prev_delta) {
            if (++noncontract >= 8)
                throw NumericError(
                    "compute_invariant_graph: transform is not contracting at radius " +
                    std::to_string(opt.radius));
        } else {
            noncontract = 0;
        }
        if (it > 1) out.contraction_ratio = delta / prev_delta;
        prev_delta = delta;
    }
    out.g.y = tab;

    // defect and tangency diagnostics
    double defect = 0.0;
    for (int i = 0; i < opt.nodes; ++i) {
        const double s = -opt.radius + h * i;
        const Vec2 im = map.eval({eval_g(tab, s), s});
        defect = std::max(defect, std::abs(im.x1 - eval_g(tab, im.x2)));
    }
    out.invariance_defect = defect;
    out.dg0 = out.deriv(0.0);
    return out;
}

namespace {

maps::PlanarMap make_theta1(const maps::PlanarMap& map, const PsiOptions& opt) {
    maps::PlanarMap t;
    t.eval = [map, opt](const Vec2& x) { return Vec2{x.x1, psi_at(map, x, opt)}; };
    t.jacobian = [map, opt](const Vec2& x) {
        const Vec2 g = psi_grad_at(map, x, opt);
        return Mat2{1.0, 0.0, g.x1, g.x2};
    };
    t.linear_part = Mat2::identity();
    t.trust_radius = map.trust_radius;
    return t;
}

maps::PlanarMap make_theta1_inv(const maps::PlanarMap& map, const PsiOptions& opt) {
    auto solve = [map, opt](const Vec2& y) {
        // psi(y1, t) = y2; psi is increasing in t (D psi ~ (0,1))
        auto f = [&](double t) { return psi_at(map, {y.x1, t}, opt) - y.x2; };
        double d = 1e-3 + 0.5 * std::abs(y.x2);
        double lo = y.x2 - d, hi = y.x2 + d;
        for (int k = 0; k < 60 && (f(lo) > 0 || f(hi) < 0); ++k) {
            d *= 2.0;
            lo = y.x2 - d;
            hi = y.x2 + d;
        }
        return Vec2{y.x1, num::solve_bracketed(f, lo, hi, 1e-13)};
    };
    maps::PlanarMap t;
    t.eval = solve;
    t.jacobian = [map, opt, solve](const Vec2& y) {
        const Vec2 pre = solve(y);
        const Vec2 g = psi_grad_at(map, pre, opt);
        return Mat2{1.0, 0.0, g.x1, g.x2}.inverse();
    };
    t.linear_part = Mat2::identity();
    t.trust_radius = map.trust_radius;
    return t;
}

maps::PlanarMap shear_from_graph(const InvariantGraph& graph, bool forward) {
    // forward: (x1 - g(x2), x2); inverse: (x1 + g(x2), x2)
    const double sgn = forward ? -1.0 : 1.0;
    maps::PlanarMap t;
    t.eval = [graph, sgn](const Vec2& x) {
        return Vec2{x.x1 + sgn * graph.eval(x.x2), x.x2};
    };
    t.jacobian = [graph, sgn](const Vec2& x) {
        return Mat2{1.0, sgn * graph.deriv(x.x2), 0.0, 1.0};
    };
    t.linear_part = Mat2::identity();
    t.trust_radius = 1e9;
    return t;
}

}  // namespace

FlatteningResult flatten_poincare(const maps::PlanarMap& map,
                                  const PsiOptions& psi_opt,
                                  const GraphOptions& graph_opt) {
    using spectral::DomainKind;
    spectral::SpectralParams p{map.linear_part.a11, map.linear_part.a22, 1.0};
    if (spectral::classify_domain(p) != DomainKind::PoincareContraction)
        throw std::domain_error("flatten_poincare: map is not a Poincare contraction");

    FlatteningResult out;
    const maps::PlanarMap theta1 = make_theta1(map, psi_opt);
    const maps::PlanarMap theta1_inv = make_theta1_inv(map, psi_opt);
    const maps::PlanarMap hat = maps::conjugate(theta1, map, theta1_inv);

    out.graph = compute_invariant_graph(hat, graph_opt);
    const maps::PlanarMap theta2 = shear_from_graph(out.graph, true);
    const maps::PlanarMap theta2_inv = shear_from_graph(out.graph, false);

    out.flat = maps::conjugate(theta2, hat, theta2_inv);
    out.flat.x2_axis_invariant = true;
    out.theta.eval = [theta1, theta2](const Vec2& x) { return theta2.eval(theta1.eval(x)); };
    out.theta.jacobian = [theta1, theta2](const Vec2& x) {
        return theta2.jacobian(theta1.eval(x)) * theta1.jacobian(x);
    };
    out.theta.linear_part = Mat2::identity();
    out.theta.trust_radius = map.trust_radius;
    out.theta_inv.eval = [theta1_inv, theta2_inv](const Vec2& y) {
        return theta1_inv.eval(theta2_inv.eval(y));
    };
    out.theta_inv.jacobian = [theta1_inv, theta2_inv](const Vec2& y) {
        return theta1_inv.jacobian(theta2_inv.eval(y)) * theta2_inv.jacobian(y);
    };
    out.theta_inv.linear_part = Mat2::identity();
    out.theta_inv.trust_radius = map.trust_radius;
    out.provenance = "psi-limit + invariant-graph shear";

    // determinant sign check of Theta1 on a coarse sample
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) {
            const Vec2 x{0.02 * i, 0.02 * j};
            if (theta1.jacobian(x).det() <= 0.0)
                throw NumericError("flatten_poincare: Theta1 fails orientation check");
        }

    const double probe = graph_opt.radius / 8.0;
    double axis = 0.0, lin = 0.0;
    for (int k = -8; k <= 8; ++k) {
        const double s = probe * k / 8.0;
        axis = std::max(axis, std::abs(out.flat.eval({0.0, s}).x1));
        for (int k2 = -2; k2 <= 2; ++k2) {
            const Vec2 x{probe * k2 / 2.0, s};
            lin = std::max(lin, std::abs(out.flat.eval(x).x2 -
                                         map.linear_part.a22 * x.x2));
        }
    }
    out.axis_residual = axis;
    out.linearity_residual = lin;
    return out;
}

namespace {

// Forward-transport graph transform over an expanding base direction.
// relation: g(pi_base F(g(s), s)) = pi_other F(g(s), s); solved per node by
// inverting the base dynamics with bisection.
struct TransportSpec {
    // eval with candidate graph substituted; returns (base_image, other_image)
    std::function<std::pair<double, double>(double, double)> step;  // (s, g(s))
};

std::vector<double> transport_iterate(const TransportSpec& spec,
                                      const GraphOptions& opt, int& iters,
                                      double& ratio) {
    const double h = 2.0 * opt.radius / (opt.nodes - 1);
    std::vector<double> tab(opt.nodes, 0.0), next(opt.nodes, 0.0);
    num::LinearInterp interp{opt.radius, tab};
    double prev_delta = std::numeric_limits<double>::infinity();
    int noncontract = 0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        interp.y = tab;
        auto g = [&](double s) { return std::abs(s) > opt.radius ? 0.0 : interp(s); };
        double delta = 0.0;
        for (int i = 0; i < opt.nodes; ++i) {
            const double target = -opt.radius + h * i;
            // solve base_image(s*) = target; base dynamics expand so s* lies
            // within [-radius, radius] for targets in range
            auto fb = [&](double s) { return spec.step(s, g(s)).first - target; };
            double lo = -opt.radius, hi = opt.radius;
            if (fb(lo) > 0 || fb(hi) < 0) {  // orientation-reversed base
                std::swap(lo, hi);
                if (fb(lo) > 0 || fb(hi) < 0)
                    throw NumericError("straighten: base dynamics not monotone");
                const double s = num::solve_bracketed(
                    [&](double t) { return -fb(t); }, hi, lo, 1e-13);
                next[i] = spec.step(s, g(s)).second;
                delta = std::max(delta, std::abs(next[i] - tab[i]));
                continue;
            }
            const double s = num::solve_bracketed(fb, lo, hi, 1e-13);
            next[i] = spec.step(s, g(s)).second;
            delta = std::max(delta, std::abs(next[i] - tab[i]));
        }
        tab.swap(next);
        iters = it;
        if (delta < opt.tol) break;
        if (delta >= prev_delta && ++noncontract >= 8)
            throw NumericError("straighten: graph transform not contracting");
        if (it > 1) ratio = delta / prev_delta;
        prev_delta = delta;
    }
    return tab;
}

}  // namespace

StraightenResult straighten_siegel_axes(const maps::PlanarMap& map,
                                        const GraphOptions& opt) {
    spectral::SpectralParams p{map.linear_part.a11, map.linear_part.a22, 1.0};
    if (spectral::classify_domain(p) != spectral::DomainKind::Siegel)
        throw std::domain_error("straighten_siegel_axes: map is not a saddle");
    if (!map.has_inverse())
        throw std::domain_error("straighten_siegel_axes: inverse required");

    StraightenResult out;

    // unstable manifold x1 = g(x2): transport by F (x2 expands)
    TransportSpec unstable_spec;
    unstable_spec.step = [&map](double s, double gs) {
        const Vec2 im = map.eval({gs, s});
        return std::pair<double, double>(im.x2, im.x1);
    };
    int it_u = 0;
    double rat_u = 0.0;
    std::vector<double> gu = transport_iterate(unstable_spec, opt, it_u, rat_u);

    // stable manifold x2 = h(x1): transport by F^{-1} (x1 expands backwards)
    TransportSpec stable_spec;
    stable_spec.step = [&map](double s, double hs) {
        const Vec2 im = map.inverse({s, hs});
        return std::pair<double, double>(im.x1, im.x2);
    };
    int it_s = 0;
    double rat_s = 0.0;
    std::vector<double> hs = transport_iterate(stable_spec, opt, it_s, rat_s);

    out.unstable.g = num::LinearInterp{opt.radius, gu};
    out.unstable.iterations = it_u;
    out.unstable.contraction_ratio = rat_u;
    out.unstable.dg0 = out.unstable.deriv(0.0);
    out.stable.g = num::LinearInterp{opt.radius, hs};
    out.stable.iterations = it_s;
    out.stable.contraction_ratio = rat_s;
    out.stable.dg0 = out.stable.deriv(0.0);

    const InvariantGraph gu_graph = out.unstable;
    const InvariantGraph hs_graph = out.stable;

    maps::PlanarMap theta;
    theta.eval = [gu_graph, hs_graph](const Vec2& x) {
        return Vec2{x.x1 - gu_graph.eval(x.x2), x.x2 - hs_graph.eval(x.x1)};
    };
    theta.jacobian = [gu_graph, hs_graph](const Vec2& x) {
        return Mat2{1.0, -gu_graph.deriv(x.x2), -hs_graph.deriv(x.x1), 1.0};
    };
    theta.linear_part = Mat2::identity();
    theta.trust_radius = map.trust_radius;

    maps::PlanarMap theta_inv;
    theta_inv.eval = [gu_graph, hs_graph](const Vec2& y) {
        Vec2 x = y;
        for (int k = 0; k < 200; ++k) {
            const Vec2 nx{y.x1 + gu_graph.eval(x.x2), y.x2 + hs_graph.eval(x.x1)};
            if (max_norm(nx - x) < 1e-15) return nx;
            x = nx;
        }
        return x;
    };
    theta_inv.jacobian = [gu_graph, hs_graph, theta_inv_eval = theta_inv.eval,
                          theta](const Vec2& y) {
        return theta.jacobian(theta_inv_eval(y)).inverse();
    };
    theta_inv.linear_part = Mat2::identity();
    theta_inv.trust_radius = map.trust_radius;

    out.straightened = maps::conjugate(theta, map, theta_inv);
    out.straightened.x1_axis_invariant = true;
    out.straightened.x2_axis_invariant = true;
    out.theta = theta;
    out.theta_inv = theta_inv;

    double res = 0.0;
    for (int k = -10; k <= 10; ++k) {
        const double s = opt.radius * 0.45 * k / 10.0;
        res = std::max(res, std::abs(out.straightened.eval({0.0, s}).x1));
        res = std::max(res, std::abs(out.straightened.eval({s, 0.0}).x2));
    }
    out.axis_residual = res;
    return out;
}

}  // namespace hyperlin::manifolds
