#include "hyperlin/whitney.hpp"

#include <array>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "hyperlin/numerics.hpp"

namespace hyperlin::whitney {

namespace {
constexpr double kOnAxisTol = 0.0;  // membership in the cross is exact

bool on_x1_axis(const Vec2& p) { return p.x2 == kOnAxisTol; }
bool on_x2_axis(const Vec2& p) { return p.x1 == kOnAxisTol; }
}  // namespace

double JetOnCross::h00(const Vec2& p) const {
    if (on_x1_axis(p)) return value_x1(p.x1);
    if (on_x2_axis(p)) return value_x2(p.x2);
    throw std::domain_error("JetOnCross: point off the cross");
}
double JetOnCross::h10(const Vec2& p) const {
    if (on_x1_axis(p)) return d1_x1(p.x1);
    if (on_x2_axis(p)) return d1_x2(p.x2);
    throw std::domain_error("JetOnCross: point off the cross");
}
double JetOnCross::h01(const Vec2& p) const {
    if (on_x1_axis(p)) return d2_x1(p.x1);
    if (on_x2_axis(p)) return d2_x2(p.x2);
    throw std::domain_error("JetOnCross: point off the cross");
}

void JetOnCross::check_origin_consistency(double tol) const {
    if (std::abs(value_x1(0.0) - value_x2(0.0)) > tol ||
        std::abs(d1_x1(0.0) - d1_x2(0.0)) > tol ||
        std::abs(d2_x1(0.0) - d2_x2(0.0)) > tol)
        throw std::invalid_argument("JetOnCross: branches disagree at the origin");
}

PsiStarJets jet_from_axis_data(const funceq::AxisJets& p, const funceq::AxisJets& q,
                               double radius, double alpha) {
    const double tol = 1e-8;
    if (std::abs(p.j11(0.0) - 1.0) > tol || std::abs(p.j22(0.0) - 1.0) > tol ||
        std::abs(p.joff(0.0)) > tol || std::abs(q.j11(0.0) - 1.0) > tol ||
        std::abs(q.j22(0.0) - 1.0) > tol || std::abs(q.joff(0.0)) > tol)
        throw std::invalid_argument("jet_from_axis_data: jets violate the origin normalization");

    // cumulative trapezoid of a sampled axis function
    auto antiderivative = [radius](const funceq::AxisFunction& fn) {
        const int n = 4097;
        const double h = 2.0 * radius / (n - 1);
        std::vector<double> acc(n, 0.0);
        const int c = (n - 1) / 2;
        for (int i = c + 1; i < n; ++i) {
            const double a = -radius + h * (i - 1), b = -radius + h * i;
            acc[i] = acc[i - 1] + 0.5 * h * (fn(a) + fn(b));
        }
        for (int i = c - 1; i >= 0; --i) {
            const double a = -radius + h * i, b = -radius + h * (i + 1);
            acc[i] = acc[i + 1] - 0.5 * h * (fn(a) + fn(b));
        }
        return num::LinearInterp{radius, acc};
    };

    PsiStarJets out;
    auto ip11 = antiderivative(p.j11);
    out.first.radius = radius;
    out.first.alpha = alpha;
    out.first.value_x1 = [ip11](double s) { return ip11(s); };
    out.first.d1_x1 = [p](double s) { return p.j11(s); };
    out.first.d2_x1 = [p](double s) { return p.joff(s); };
    out.first.value_x2 = [](double) { return 0.0; };
    out.first.d1_x2 = [q](double s) { return q.j11(s); };
    out.first.d2_x2 = [](double) { return 0.0; };

    auto iq22 = antiderivative(q.j22);
    out.second.radius = radius;
    out.second.alpha = alpha;
    out.second.value_x2 = [iq22](double s) { return iq22(s); };
    out.second.d1_x2 = [q](double s) { return q.joff(s); };
    out.second.d2_x2 = [q](double s) { return q.j22(s); };
    out.second.value_x1 = [](double) { return 0.0; };
    out.second.d1_x1 = [](double) { return 0.0; };
    out.second.d2_x1 = [p](double s) { return p.j22(s); };

    out.first.check_origin_consistency();
    out.second.check_origin_consistency();
    return out;
}

WhitneyCheck check_whitney_conditions(const JetOnCross& jet, long pair_budget,
                                      std::uint64_t seed) {
    jet.check_origin_consistency();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-jet.radius, jet.radius);
    std::uniform_int_distribution<int> which(0, 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    WhitneyCheck out;
    auto classify = [](const Vec2& x, const Vec2& y) {
        const bool x_on2 = on_x2_axis(x), y_on2 = on_x2_axis(y);
        if (x_on2 && y_on2) return 0;
        if (x_on2 && !y_on2) return 1;
        if (!x_on2 && y_on2) return 2;
        return 3;
    };
    for (long k = 0; k < pair_budget; ++k) {
        // dyadically shrunk second coordinate keeps small distances sampled
        const double scale = std::pow(0.5, std::floor(unit(rng) * 10.0));
        Vec2 x = which(rng) ? Vec2{coord(rng), 0.0} : Vec2{0.0, coord(rng)};
        Vec2 y = which(rng) ? Vec2{coord(rng) * scale, 0.0} : Vec2{0.0, coord(rng) * scale};
        if (max_norm(x - y) == 0.0) continue;
        const double d = max_norm(x - y);
        const double r00 = jet.h00(x) - jet.h00(y) - jet.h10(y) * (x.x1 - y.x1) -
                           jet.h01(y) * (x.x2 - y.x2);
        const double r10 = jet.h10(x) - jet.h10(y);
        const double r01 = jet.h01(x) - jet.h01(y);
        auto& c = out.cases[classify(x, y)];
        ++c.count;
        const double q00 = std::abs(r00) / std::pow(d, 1.0 + jet.alpha);
        const double q10 = std::abs(r10) / std::pow(d, jet.alpha);
        const double q01 = std::abs(r01) / std::pow(d, jet.alpha);
        if (!std::isfinite(q00) || !std::isfinite(q10) || !std::isfinite(q01))
            c.finite = false;
        c.r00_ratio = std::max(c.r00_ratio, q00);
        c.r10_ratio = std::max(c.r10_ratio, q10);
        c.r01_ratio = std::max(c.r01_ratio, q01);
    }
    return out;
}

// ---------------------------------------------------------------------------
// dyadic cube extension

namespace {

double smooth_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// 1 for t <= 0, 0 for t >= 1
double sstep(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = smooth_h(1.0 - t), b = smooth_h(t);
    return a / (a + b);
}
double sstep_d(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = smooth_h(1.0 - t), b = smooth_h(t);
    const double da = smooth_h(1.0 - t) / ((1.0 - t) * (1.0 - t));
    const double db = smooth_h(t) / (t * t);
    const double s = a + b;
    return (-da * s - a * (-da + db)) / (s * s);
}

struct Cube {
    int level;       // side = 2^{-level} (levels may be negative)
    long i, j;       // lattice coordinates
    double side() const { return std::ldexp(1.0, -level); }
    Vec2 center() const {
        const double s = side();
        return {(i + 0.5) * s, (j + 0.5) * s};
    }
    bool operator<(const Cube& o) const {
        return std::tie(level, i, j) < std::tie(o.level, o.i, o.j);
    }
};

}  // namespace

class Extension {
  public:
    Extension(const JetOnCross& jet, int max_level)
        : jet_(jet), max_level_(max_level) {}

    // distance from an axis-aligned box to the cross
    double box_dist(double x0, double x1, double y0, double y1) const {
        const double a = jet_.radius;
        auto seg = [&](double u0, double u1, double v0, double v1) {
            // distance from box [u0,u1]x[v0,v1] to segment [-a,a]x{0}
            double du = 0.0;
            if (u0 > a) du = u0 - a;
            else if (u1 < -a) du = -a - u1;
            double dv = 0.0;
            if (v0 > 0) dv = v0;
            else if (v1 < 0) dv = -v1;
            return std::hypot(du, dv);
        };
        return std::min(seg(x0, x1, y0, y1), seg(y0, y1, x0, x1));
    }

    double cube_dist(const Cube& c) const {
        const double s = c.side();
        return box_dist(c.i * s, (c.i + 1) * s, c.j * s, (c.j + 1) * s);
    }

    bool admissible(const Cube& c) const { return c.side() <= cube_dist(c) / 4.0; }

    // canonical selection: admissible with an inadmissible parent
    bool selected(const Cube& c) const {
        if (!admissible(c)) return false;
        Cube parent{c.level - 1, c.i >= 0 ? c.i / 2 : (c.i - 1) / 2,
                    c.j >= 0 ? c.j / 2 : (c.j - 1) / 2};
        return !admissible(parent);
    }

    double point_dist(const Vec2& p) const {
        return box_dist(p.x1, p.x1, p.x2, p.x2);
    }

    // nearest cross point: componentwise clamp, axis by smaller distance,
    // ties toward the x1-axis
    Vec2 nearest_on_cross(const Vec2& p) const {
        const double a = jet_.radius;
        const Vec2 c1{std::clamp(p.x1, -a, a), 0.0};
        const Vec2 c2{0.0, std::clamp(p.x2, -a, a)};
        const double d1 = std::hypot(p.x1 - c1.x1, p.x2);
        const double d2 = std::hypot(p.x1, p.x2 - c2.x2);
        return d1 <= d2 ? c1 : c2;
    }

    double taylor(const Vec2& anchor, const Vec2& p) const {
        return jet_.h00(anchor) + jet_.h10(anchor) * (p.x1 - anchor.x1) +
               jet_.h01(anchor) * (p.x2 - anchor.x2);
    }
    Vec2 taylor_grad(const Vec2& anchor) const {
        return {jet_.h10(anchor), jet_.h01(anchor)};
    }

    // level of the selected cube containing p (coarse-to-fine walk)
    int level_of(const Vec2& p) const {
        for (int k = -8; k <= max_level_; ++k) {
            const double s = std::ldexp(1.0, -k);
            Cube c{k, static_cast<long>(std::floor(p.x1 / s)),
                   static_cast<long>(std::floor(p.x2 / s))};
            if (admissible(c)) return k;
        }
        return max_level_ + 1;  // pathologically close to the cross
    }

    // cubes whose inflated support can contain p
    std::vector<Cube> active_cubes(const Vec2& p) const {
        std::vector<Cube> cubes;
        const int k0 = level_of(p);
        if (k0 > max_level_) return cubes;
        for (int k = std::max(-8, k0 - 3); k <= std::min(max_level_, k0 + 3); ++k) {
            const double s = std::ldexp(1.0, -k);
            const long ci = static_cast<long>(std::floor(p.x1 / s));
            const long cj = static_cast<long>(std::floor(p.x2 / s));
            for (long di = -2; di <= 2; ++di) {
                for (long dj = -2; dj <= 2; ++dj) {
                    Cube c{k, ci + di, cj + dj};
                    if (!selected(c)) continue;
                    if (weight_raw(c, p) > 0.0) cubes.push_back(c);
                }
            }
        }
        return cubes;
    }

    // un-normalized bump of the 9/8-inflated cube
    double weight_raw(const Cube& c, const Vec2& p) const {
        const Vec2 ctr = c.center();
        const double H = 0.5 * c.side();
        const double w = H / 8.0;  // transition from H to 9H/8
        return sstep((std::abs(p.x1 - ctr.x1) - H) / w) *
               sstep((std::abs(p.x2 - ctr.x2) - H) / w);
    }

    Vec2 weight_raw_grad(const Cube& c, const Vec2& p) const {
        const Vec2 ctr = c.center();
        const double H = 0.5 * c.side();
        const double w = H / 8.0;
        const double t1 = (std::abs(p.x1 - ctr.x1) - H) / w;
        const double t2 = (std::abs(p.x2 - ctr.x2) - H) / w;
        const double f1 = sstep(t1), f2 = sstep(t2);
        const double g1 = sstep_d(t1) * ((p.x1 - ctr.x1) >= 0 ? 1.0 : -1.0) / w;
        const double g2 = sstep_d(t2) * ((p.x2 - ctr.x2) >= 0 ? 1.0 : -1.0) / w;
        return {g1 * f2, f1 * g2};
    }

    struct EvalResult {
        double value;
        Vec2 grad;
        int cubes;
    };

    EvalResult eval(const Vec2& p) const {
        if (point_dist(p) == 0.0) {
            return {jet_.h00(p), taylor_grad(p), 0};
        }
        const std::vector<Cube> cubes = active_cubes(p);
        if (cubes.empty()) {
            // fallback: anchored polynomial (depth exceeded near the cross)
            const Vec2 y = nearest_on_cross(p);
            return {taylor(y, p), taylor_grad(y), 0};
        }
        double S = 0.0;
        Vec2 Sg{0, 0};
        std::vector<double> w(cubes.size());
        std::vector<Vec2> wg(cubes.size());
        for (std::size_t k = 0; k < cubes.size(); ++k) {
            w[k] = weight_raw(cubes[k], p);
            wg[k] = weight_raw_grad(cubes[k], p);
            S += w[k];
            Sg = Sg + wg[k];
        }
        double val = 0.0;
        Vec2 grad{0, 0};
        for (std::size_t k = 0; k < cubes.size(); ++k) {
            const Vec2 y = nearest_on_cross(cubes[k].center());
            const double P = taylor(y, p);
            const Vec2 Pg = taylor_grad(y);
            const double phi = w[k] / S;
            // d(w_k/S) = (dw_k S - w_k dS)/S^2
            const Vec2 phig{(wg[k].x1 * S - w[k] * Sg.x1) / (S * S),
                            (wg[k].x2 * S - w[k] * Sg.x2) / (S * S)};
            val += phi * P;
            grad = grad + Vec2{phig.x1 * P + phi * Pg.x1, phig.x2 * P + phi * Pg.x2};
        }
        return {val, grad, static_cast<int>(cubes.size())};
    }

    std::vector<double> partition_weights(const Vec2& p) const {
        std::vector<double> out;
        const std::vector<Cube> cubes = active_cubes(p);
        double S = 0.0;
        for (const Cube& c : cubes) S += weight_raw(c, p);
        for (const Cube& c : cubes) out.push_back(weight_raw(c, p) / S);
        return out;
    }

    const JetOnCross& jet() const { return jet_; }

  private:
    JetOnCross jet_;
    int max_level_;
};

double ExtensionField::eval(const Vec2& p) const { return extension->eval(p).value; }
Vec2 ExtensionField::grad(const Vec2& p) const { return extension->eval(p).grad; }
std::vector<double> ExtensionField::partition_weights(const Vec2& p) const {
    return extension->partition_weights(p);
}

ExtensionField whitney_extend(const JetOnCross& jet, const GridSpec& target_grid,
                              double alpha) {
    target_grid.validate();
    JetOnCross j = jet;
    j.alpha = alpha;
    auto ext = std::make_shared<Extension>(j, /*max_level=*/48);

    ExtensionField out;
    out.extension = ext;
    out.value = ScalarField2D(target_grid);
    out.gradient = VectorField2D(target_grid);
    std::set<std::pair<int, std::pair<long, long>>> seen;
    for (int i = 0; i < target_grid.n; ++i) {
        for (int jj = 0; jj < target_grid.n; ++jj) {
            const Vec2 p = target_grid.point(i, jj);
            const Extension::EvalResult r = ext->eval(p);
            out.value.at(i, jj) = r.value;
            out.gradient.at(i, jj) = r.grad;
            for (const Cube& c : ext->active_cubes(p))
                seen.insert({c.level, {c.i, c.j}});
        }
    }
    out.cube_count = static_cast<long>(seen.size());

    // sampled gradient Holder quotient
    double hol = 0.0;
    const double h = target_grid.spacing();
    for (int i = 0; i + 1 < target_grid.n; i += 2) {
        for (int jj = 0; jj + 1 < target_grid.n; jj += 2) {
            const Vec2 g0 = out.gradient.at(i, jj);
            const Vec2 g1 = out.gradient.at(i + 1, jj);
            const Vec2 g2 = out.gradient.at(i, jj + 1);
            hol = std::max(hol, max_norm(g1 - g0) / std::pow(h, alpha));
            hol = std::max(hol, max_norm(g2 - g0) / std::pow(h, alpha));
        }
    }
    out.attained_holder_constant = hol;
    return out;
}

PsiStarResult assemble_psi_star(const ExtensionField& first,
                                const ExtensionField& second,
                                const maps::PlanarMap& map, double sample_radius) {
    auto e1 = first.extension, e2 = second.extension;
    maps::PlanarMap psi;
    psi.eval = [e1, e2](const Vec2& x) {
        return Vec2{e1->eval(x).value, e2->eval(x).value};
    };
    psi.jacobian = [e1, e2](const Vec2& x) {
        const Vec2 g1 = e1->eval(x).grad, g2 = e2->eval(x).grad;
        return Mat2{g1.x1, g1.x2, g2.x1, g2.x2};
    };
    auto newton_failures = std::make_shared<int>(0);
    auto eval_fn = psi.eval;
    auto jac_fn = psi.jacobian;
    psi.inverse = [eval_fn, jac_fn, newton_failures](const Vec2& y) {
        Vec2 x = y;
        double res = max_norm(eval_fn(x) - y);
        for (int it = 0; it < 60; ++it) {
            if (res < 1e-12) return x;
            const Vec2 rv = eval_fn(x) - y;
            const Mat2 J = jac_fn(x);
            const Vec2 step = J.inverse() * rv;
            double damp = 1.0;
            for (int half = 0; half < 30; ++half) {
                const Vec2 cand = x - step * damp;
                const double cres = max_norm(eval_fn(cand) - y);
                if (cres < res) {
                    x = cand;
                    res = cres;
                    break;
                }
                damp *= 0.5;
                if (half == 29) {
                    ++*newton_failures;
                    throw NumericError("psi_star inverse: Newton stalled");
                }
            }
        }
        if (res > 1e-10) throw NumericError("psi_star inverse: Newton did not converge");
        return x;
    };
    psi.linear_part = Mat2::identity();
    psi.trust_radius = map.trust_radius;

    PsiStarResult out;
    out.psi_star = psi;

    const maps::PlanarMap conj = maps::conjugate(psi, map, maps::invert(psi));
    double vres = 0.0, dres = 0.0;
    const double l1 = map.linear_part.a11, l2 = map.linear_part.a22;
    for (int k = -10; k <= 10; ++k) {
        const double s = sample_radius * k / 10.0;
        const Vec2 im1 = conj.eval({s, 0.0});
        const Vec2 im2 = conj.eval({0.0, s});
        vres = std::max(vres, max_norm(im1 - Vec2{l1 * s, 0.0}));
        vres = std::max(vres, max_norm(im2 - Vec2{0.0, l2 * s}));
        if (k % 5 == 0) {
            dres = std::max(dres, op_norm(conj.jacobian({s, 0.0}) - map.linear_part));
            dres = std::max(dres, op_norm(conj.jacobian({0.0, s}) - map.linear_part));
        }
    }
    out.verification.axis_value_residual = vres;
    out.verification.axis_deriv_residual = dres;
    out.verification.origin_jacobian_defect =
        op_norm(psi.jacobian({0.0, 0.0}) - Mat2::identity());
    out.verification.newton_failures = *newton_failures;
    return out;
}

}  // namespace hyperlin::whitney
