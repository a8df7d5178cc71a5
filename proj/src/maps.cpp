#include "hyperlin/maps.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperlin/numerics.hpp"

namespace hyperlin::maps {

void BumpProfile::validate() const {
    if (!(inner_radius > 0) || !(outer_radius > inner_radius))
        throw std::invalid_argument("bump profile: need 0 < inner_radius < outer_radius");
}

// ---------------------------------------------------------------------------
// smoothing kernel

double SmoothingKernel::q(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(1.0 / (t * (t - 1.0)));
}

namespace {
// 12-point Gauss-Legendre nodes/weights on [-1,1]
constexpr std::array<double, 12> kGlNodes = {
    -0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
    -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
    0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
    0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
constexpr std::array<double, 12> kGlWeights = {
    0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
    0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

double gl_panel(double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i)
        acc += kGlWeights[i] * SmoothingKernel::q(c + h * kGlNodes[i]);
    return acc * h;
}
}  // namespace

SmoothingKernel::SmoothingKernel(double quadrature_tolerance)
    : tol_(quadrature_tolerance), panels_(2048) {
    prefix_.resize(panels_ + 1, 0.0);
    for (int i = 0; i < panels_; ++i) {
        const double a = static_cast<double>(i) / panels_;
        const double b = static_cast<double>(i + 1) / panels_;
        prefix_[i + 1] = prefix_[i] + gl_panel(a, b);
    }
    normalization_ = prefix_[panels_];
    // cross-check against an independent adaptive pass
    const double check = num::integrate([](double t) { return q(t); }, 0.0, 1.0, tol_);
    if (std::abs(check - normalization_) > 10 * tol_)
        throw NumericError("smoothing kernel: quadrature table disagrees with adaptive pass");
}

double SmoothingKernel::prefix(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return normalization_;
    const double pos = t * panels_;
    int i = std::min(static_cast<int>(pos), panels_ - 1);
    return prefix_[i] + gl_panel(static_cast<double>(i) / panels_, t);
}

const SmoothingKernel& shared_kernel() {
    static const SmoothingKernel kernel;
    return kernel;
}

// ---------------------------------------------------------------------------
// building blocks

double p_alpha(double s, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("p_alpha: alpha must lie in (0,1]");
    return s > 0.0 ? std::pow(s, 1.0 + alpha) : 0.0;
}

double p_alpha_deriv(double s, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("p_alpha: alpha must lie in (0,1]");
    return s > 0.0 ? (1.0 + alpha) * std::pow(s, alpha) : 0.0;
}

double u_transition(double x1, double x2) {
    if (x1 == 0.0 && x2 == 0.0)
        throw std::domain_error("u_transition: undefined at the origin");
    const SmoothingKernel& k = shared_kernel();
    if (x2 == 0.0) return x1 > 0.0 ? 1.0 : 0.0;
    const double t = x1 / std::abs(x2);
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return k.prefix(t) / k.normalization();
}

Vec2 u_transition_grad(double x1, double x2) {
    if (x1 == 0.0 && x2 == 0.0)
        throw std::domain_error("u_transition: undefined at the origin");
    if (x2 == 0.0) return {0.0, 0.0};
    const double a = std::abs(x2);
    const double t = x1 / a;
    if (t <= 0.0 || t >= 1.0) return {0.0, 0.0};
    const SmoothingKernel& k = shared_kernel();
    const double qn = SmoothingKernel::q(t) / k.normalization();
    return {qn / a, -qn * t * (x2 > 0 ? 1.0 : -1.0) / a};
}

namespace {

double smooth_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double smooth_h_deriv(double t) {
    return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0;
}

// 1 for t <= 0, 0 for t >= 1, C^inf in between.
double smooth_step(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = smooth_h(1.0 - t), b = smooth_h(t);
    return a / (a + b);
}

double smooth_step_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = smooth_h(1.0 - t), b = smooth_h(t);
    const double da = -smooth_h_deriv(1.0 - t), db = smooth_h_deriv(t);
    const double s = a + b;
    return (da * s - a * (da + db)) / (s * s);
}

}  // namespace

// Separable cutoff: equal to 1 exactly on the max-norm disk U and 0 outside
// V, matching the norm the rest of the construction uses.
double bump(const Vec2& x, const BumpProfile& profile) {
    profile.validate();
    const double w = profile.outer_radius - profile.inner_radius;
    const double f1 = smooth_step((std::abs(x.x1) - profile.inner_radius) / w);
    const double f2 = smooth_step((std::abs(x.x2) - profile.inner_radius) / w);
    return f1 * f2;
}

Vec2 bump_grad(const Vec2& x, const BumpProfile& profile) {
    profile.validate();
    const double w = profile.outer_radius - profile.inner_radius;
    const double t1 = (std::abs(x.x1) - profile.inner_radius) / w;
    const double t2 = (std::abs(x.x2) - profile.inner_radius) / w;
    const double f1 = smooth_step(t1), f2 = smooth_step(t2);
    const double d1 = smooth_step_deriv(t1) * (x.x1 >= 0 ? 1.0 : -1.0) / w;
    const double d2 = smooth_step_deriv(t2) * (x.x2 >= 0 ? 1.0 : -1.0) / w;
    return {d1 * f2, f1 * d2};
}

// ---------------------------------------------------------------------------
// map families

PlanarMap linear_map(double lambda1, double lambda2) {
    PlanarMap m;
    const Mat2 L = Mat2::diag(lambda1, lambda2);
    m.eval = [L](const Vec2& x) { return L * x; };
    m.jacobian = [L](const Vec2&) { return L; };
    const Mat2 Li = L.inverse();
    m.inverse = [Li](const Vec2& y) { return Li * y; };
    m.linear_part = L;
    m.x1_axis_invariant = m.x2_axis_invariant = true;
    m.trust_radius = 1e9;
    return m;
}

namespace {

struct AxisBumpCore {
    double l1, l2, alpha;
    BumpProfile profile;

    // perturbation w(x) = rho(x) u(l1 x1, l2 x2) p_alpha(l2 x2)
    double w(const Vec2& x) const {
        if (x.x1 == 0.0 && x.x2 == 0.0) return 0.0;
        const double p = p_alpha(l2 * x.x2, alpha);
        if (p == 0.0) return 0.0;
        const double r = bump(x, profile);
        if (r == 0.0) return 0.0;
        return r * u_transition(l1 * x.x1, l2 * x.x2) * p;
    }

    Vec2 eval(const Vec2& x) const { return {l1 * x.x1 + w(x), l2 * x.x2}; }

    Mat2 jac(const Vec2& x) const {
        Mat2 J = Mat2::diag(l1, l2);
        if (x.x1 == 0.0 && x.x2 == 0.0) return J;
        const double p = p_alpha(l2 * x.x2, alpha);
        const double pd = p_alpha_deriv(l2 * x.x2, alpha);
        if (p == 0.0 && pd == 0.0) return J;
        const double r = bump(x, profile);
        const Vec2 rg = bump_grad(x, profile);
        if (r == 0.0 && rg.x1 == 0.0 && rg.x2 == 0.0) return J;
        const double uu = u_transition(l1 * x.x1, l2 * x.x2);
        const Vec2 ug = u_transition_grad(l1 * x.x1, l2 * x.x2);
        J.a11 += rg.x1 * uu * p + r * ug.x1 * l1 * p;
        J.a12 += rg.x2 * uu * p + r * ug.x2 * l2 * p + r * uu * pd * l2;
        return J;
    }

    // solve l1 x1 + w(x1, x2) = y1 at fixed x2
    double invert_first(double y1, double x2) const {
        const double wmax =
            p_alpha(std::abs(l2) * profile.outer_radius, alpha) + 1e-30;
        double lo = (y1 - wmax) / l1, hi = (y1 + wmax) / l1;
        if (lo > hi) std::swap(lo, hi);
        auto f = [&](double s) { return l1 * s + w({s, x2}) - y1; };
        return num::solve_bracketed(f, lo - 1e-12, hi + 1e-12, 1e-13);
    }
};

}  // namespace

PlanarMap make_axis_bump_map(const spectral::SpectralParams& params,
                             const BumpProfile& profile) {
    profile.validate();
    if (spectral::classify_domain(params) == spectral::DomainKind::Invalid)
        throw std::domain_error("axis bump map: non-hyperbolic eigenvalues");
    auto core = std::make_shared<AxisBumpCore>(
        AxisBumpCore{params.lambda1, params.lambda2, params.alpha, profile});
    PlanarMap m;
    m.eval = [core](const Vec2& x) { return core->eval(x); };
    m.jacobian = [core](const Vec2& x) { return core->jac(x); };
    const double l2 = params.lambda2;
    m.inverse = [core, l2](const Vec2& y) {
        const double x2 = y.x2 / l2;
        return Vec2{core->invert_first(y.x1, x2), x2};
    };
    m.linear_part = Mat2::diag(params.lambda1, params.lambda2);
    m.x1_axis_invariant = m.x2_axis_invariant = true;
    m.trust_radius = 10.0 * profile.outer_radius;
    return m;
}

PlanarMap make_poincare_counterexample(const spectral::SpectralParams& params,
                                       const BumpProfile& profile) {
    if (spectral::classify_domain(params) != spectral::DomainKind::PoincareContraction)
        throw std::domain_error(
            "poincare counterexample: eigenvalues must satisfy 0 < |l1| < |l2| < 1");
    return make_axis_bump_map(params, profile);
}

namespace {

// Forward map G of the Siegel counterexample; the public map is G^{-1}.
struct SiegelForwardCore {
    double l1, l2, alpha;
    BumpProfile profile;

    // s(x) = rho(x) u(x2/l2, x1/l1) p_alpha(x1/l1)
    double s(const Vec2& x) const {
        if (x.x1 == 0.0 && x.x2 == 0.0) return 0.0;
        const double p = p_alpha(x.x1 / l1, alpha);
        if (p == 0.0) return 0.0;
        const double r = bump(x, profile);
        if (r == 0.0) return 0.0;
        return r * u_transition(x.x2 / l2, x.x1 / l1) * p;
    }

    Vec2 eval(const Vec2& x) const { return {x.x1 / l1, x.x2 / l2 + s(x)}; }

    Mat2 jac(const Vec2& x) const {
        Mat2 J = Mat2::diag(1.0 / l1, 1.0 / l2);
        if (x.x1 == 0.0 && x.x2 == 0.0) return J;
        const double p = p_alpha(x.x1 / l1, alpha);
        const double pd = p_alpha_deriv(x.x1 / l1, alpha);
        if (p == 0.0 && pd == 0.0) return J;
        const double r = bump(x, profile);
        const Vec2 rg = bump_grad(x, profile);
        if (r == 0.0 && rg.x1 == 0.0 && rg.x2 == 0.0) return J;
        const double v1 = x.x2 / l2, v2 = x.x1 / l1;
        const double uu = u_transition(v1, v2);
        const Vec2 ug = u_transition_grad(v1, v2);
        J.a21 += rg.x1 * uu * p + r * ug.x2 / l1 * p + r * uu * pd / l1;
        J.a22 += rg.x2 * uu * p + r * ug.x1 / l2 * p;
        return J;
    }

    // solve pi2 G(x1, .) = y2 with x1 known
    double invert_second(double y2, double x1) const {
        const double smax = p_alpha(std::abs(x1 / l1), alpha) + 1e-30;
        const double bound = std::abs(l2) * (std::abs(y2) + smax) + 1e-12;
        auto f = [&](double t) { return t / l2 + s({x1, t}) - y2; };
        return num::solve_bracketed(f, -bound, bound, 1e-13);
    }
};

}  // namespace

PlanarMap make_siegel_counterexample(const spectral::SpectralParams& params,
                                     const BumpProfile& profile) {
    profile.validate();
    if (spectral::classify_domain(params) != spectral::DomainKind::Siegel)
        throw std::domain_error(
            "siegel counterexample: eigenvalues must satisfy |l1| < 1 < |l2|");
    auto core = std::make_shared<SiegelForwardCore>(
        SiegelForwardCore{params.lambda1, params.lambda2, params.alpha, profile});
    const double l1 = params.lambda1;
    PlanarMap m;
    m.eval = [core, l1](const Vec2& y) {
        const double x1 = l1 * y.x1;
        return Vec2{x1, core->invert_second(y.x2, x1)};
    };
    m.jacobian = [core, l1](const Vec2& y) {
        const double x1 = l1 * y.x1;
        const Vec2 pre{x1, core->invert_second(y.x2, x1)};
        return core->jac(pre).inverse();
    };
    m.inverse = [core](const Vec2& x) { return core->eval(x); };
    m.linear_part = Mat2::diag(params.lambda1, params.lambda2);
    m.x1_axis_invariant = m.x2_axis_invariant = true;
    m.trust_radius = 10.0 * profile.outer_radius;
    return m;
}

// ---------------------------------------------------------------------------
// iteration

Vec2 iterate(const PlanarMap& map, Vec2 x, int n) {
    if (n < 0 && !map.has_inverse())
        throw std::domain_error("iterate: negative power requires an inverse");
    const int steps = std::abs(n);
    for (int k = 0; k < steps; ++k) {
        x = n > 0 ? map.eval(x) : map.inverse(x);
        if (max_norm(x) > map.trust_radius)
            throw NumericError("iterate: trust region escaped at step " +
                               std::to_string(k + 1));
    }
    return x;
}

Mat2 jacobian_of_iterate(const PlanarMap& map, Vec2 x, int n) {
    Mat2 acc = Mat2::identity();
    if (n >= 0) {
        for (int k = 0; k < n; ++k) {
            acc = map.jacobian(x) * acc;
            x = map.eval(x);
            if (max_norm(x) > map.trust_radius)
                throw NumericError("jacobian_of_iterate: trust region escaped at step " +
                                   std::to_string(k + 1));
        }
    } else {
        if (!map.has_inverse())
            throw std::domain_error("jacobian_of_iterate: negative power requires an inverse");
        for (int k = 0; k < -n; ++k) {
            x = map.inverse(x);
            if (max_norm(x) > map.trust_radius)
                throw NumericError("jacobian_of_iterate: trust region escaped at step " +
                                   std::to_string(k + 1));
            acc = acc * map.jacobian(x).inverse();
        }
    }
    return acc;
}

Mat2 finite_difference_jacobian(const PlanarMap& map, const Vec2& x, double h) {
    if (!(h > 0)) throw std::invalid_argument("finite_difference_jacobian: h must be > 0");
    const Vec2 fx1p = map.eval({x.x1 + h, x.x2}), fx1m = map.eval({x.x1 - h, x.x2});
    const Vec2 fx2p = map.eval({x.x1, x.x2 + h}), fx2m = map.eval({x.x1, x.x2 - h});
    return {(fx1p.x1 - fx1m.x1) / (2 * h), (fx2p.x1 - fx2m.x1) / (2 * h),
            (fx1p.x2 - fx1m.x2) / (2 * h), (fx2p.x2 - fx2m.x2) / (2 * h)};
}

double measure_eta(const PlanarMap& map, const BumpProfile& profile,
                   int samples_per_axis) {
    double eta = 0.0;
    const double r = profile.outer_radius * 1.05;
    for (int i = 0; i < samples_per_axis; ++i) {
        for (int j = 0; j < samples_per_axis; ++j) {
            const double x1 = -r + 2.0 * r * i / (samples_per_axis - 1);
            const double x2 = -r + 2.0 * r * j / (samples_per_axis - 1);
            eta = std::max(eta, op_norm(map.jacobian({x1, x2}) - map.linear_part));
        }
    }
    return eta;
}

// ---------------------------------------------------------------------------
// conjugation helpers

PlanarMap conjugate(const PlanarMap& theta, const PlanarMap& f,
                    const PlanarMap& theta_inv) {
    PlanarMap m;
    auto te = theta.eval, fe = f.eval, ti = theta_inv.eval;
    m.eval = [te, fe, ti](const Vec2& x) { return te(fe(ti(x))); };
    auto tj = theta.jacobian, fj = f.jacobian, tij = theta_inv.jacobian;
    m.jacobian = [te, fe, ti, tj, fj, tij](const Vec2& x) {
        const Vec2 z = ti(x);
        const Vec2 fz = fe(z);
        return tj(fz) * (fj(z) * tij(x));
    };
    if (f.has_inverse()) {
        auto fi = f.inverse;
        m.inverse = [te, fi, ti](const Vec2& y) { return te(fi(ti(y))); };
    }
    m.linear_part = f.linear_part;
    m.trust_radius = f.trust_radius;
    return m;
}

PlanarMap swap_axes(const PlanarMap& f) {
    auto sw = [](const Vec2& v) { return Vec2{v.x2, v.x1}; };
    PlanarMap m;
    auto fe = f.eval;
    m.eval = [fe, sw](const Vec2& x) { return sw(fe(sw(x))); };
    auto fj = f.jacobian;
    m.jacobian = [fj, sw](const Vec2& x) {
        const Mat2 J = fj(sw(x));
        return Mat2{J.a22, J.a21, J.a12, J.a11};
    };
    if (f.has_inverse()) {
        auto fi = f.inverse;
        m.inverse = [fi, sw](const Vec2& y) { return sw(fi(sw(y))); };
    }
    m.linear_part = Mat2::diag(f.linear_part.a22, f.linear_part.a11);
    m.x1_axis_invariant = f.x2_axis_invariant;
    m.x2_axis_invariant = f.x1_axis_invariant;
    m.trust_radius = f.trust_radius;
    return m;
}

PlanarMap invert(const PlanarMap& f) {
    if (!f.has_inverse()) throw std::domain_error("invert: map has no inverse");
    PlanarMap m;
    auto fe = f.eval, fi = f.inverse;
    m.eval = fi;
    auto fj = f.jacobian;
    m.jacobian = [fj, fi](const Vec2& y) { return fj(fi(y)).inverse(); };
    m.inverse = fe;
    m.linear_part = f.linear_part.inverse();
    m.x1_axis_invariant = f.x1_axis_invariant;
    m.x2_axis_invariant = f.x2_axis_invariant;
    m.trust_radius = f.trust_radius;
    return m;
}

}  // namespace hyperlin::maps
