#include "hyperlin/holder.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hyperlin/numerics.hpp"

namespace hyperlin::holder {

HolderEstimate estimate_holder_exponent(const MatrixField2D& field,
                                        const SamplerConfig& cfg) {
    const GridSpec& g = field.grid;
    const double h = g.spacing();
    const double dmax = g.radius;
    int scales = 0;
    for (double d = dmax; d >= 2.0 * h; d *= 0.5) ++scales;
    if (scales < cfg.min_scales)
        throw std::invalid_argument(
            "estimate_holder_exponent: grid supports fewer than the required "
            "dyadic distance scales");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> idx(0, g.n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    HolderEstimate out;
    std::vector<double> logd, loge;
    double dhi = dmax;
    for (int s = 0; s < scales; ++s, dhi *= 0.5) {
        const double dlo = 0.5 * dhi;
        std::vector<double> diffs;
        diffs.reserve(cfg.pairs_per_bin);
        long attempts = 0;
        while (static_cast<long>(diffs.size()) < cfg.pairs_per_bin &&
               attempts < 20 * cfg.pairs_per_bin) {
            ++attempts;
            const int i1 = idx(rng), j1 = idx(rng);
            const double d = dlo * std::pow(dhi / dlo, unit(rng));
            const double th = 2.0 * M_PI * unit(rng);
            const int i2 = i1 + static_cast<int>(std::lround(d * std::cos(th) / h));
            const int j2 = j1 + static_cast<int>(std::lround(d * std::sin(th) / h));
            if (i2 < 0 || i2 >= g.n || j2 < 0 || j2 >= g.n) continue;
            const double dd = max_norm(g.point(i2, j2) - g.point(i1, j1));
            if (dd < dlo || dd > dhi) continue;
            diffs.push_back(op_norm(field.at(i2, j2) - field.at(i1, j1)));
        }
        if (diffs.size() < 32) continue;
        out.pair_count += static_cast<long>(diffs.size());
        const double env = num::quantile(diffs, cfg.quantile);
        out.bin_distance.push_back(std::sqrt(dlo * dhi));
        out.bin_envelope.push_back(env);
        if (env > 0) {
            logd.push_back(std::log(out.bin_distance.back()));
            loge.push_back(std::log(env));
        }
    }
    out.distance_decades = static_cast<int>(out.bin_distance.size());
    if (logd.size() < 2) {
        // constant (or sub-rounding) field: Lipschitz and better
        out.degenerate = true;
        out.beta_hat = 1.0;
        out.constant_hat = 0.0;
        out.regression_r2 = 1.0;
        return out;
    }
    const num::LineFit fit = num::fit_line(logd, loge);
    out.beta_hat = std::clamp(fit.slope, 0.0, 1.0);
    out.constant_hat = std::exp(fit.intercept);
    out.regression_r2 = fit.r2;
    return out;
}

std::vector<ModulusRow> local_modulus(const std::function<Mat2(const Vec2&)>& dphi,
                                      const Vec2& anchor, const Vec2& direction,
                                      const std::vector<double>& levels) {
    const double dn = max_norm(direction);
    if (dn == 0.0) throw std::invalid_argument("local_modulus: zero direction");
    const Vec2 e{direction.x1 / dn, direction.x2 / dn};
    const Mat2 base = dphi(anchor);
    std::vector<ModulusRow> rows;
    rows.reserve(levels.size());
    for (double d : levels) {
        if (!(d > 0)) throw std::invalid_argument("local_modulus: levels must be positive");
        const Vec2 x{anchor.x1 + e.x1 * d, anchor.x2 + e.x2 * d};
        rows.push_back({d, op_norm(dphi(x) - base)});
    }
    return rows;
}

std::vector<ModulusRow> local_modulus(const MatrixField2D& field, const Vec2& anchor,
                                      const Vec2& direction,
                                      const std::vector<double>& levels) {
    return local_modulus(
        [&field](const Vec2& p) { return field.interpolate(p); }, anchor, direction,
        levels);
}

std::vector<double> modulus_quotients(const std::vector<ModulusRow>& rows, double beta) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const ModulusRow& r : rows)
        out.push_back(r.diff_norm / std::pow(r.distance, beta));
    return out;
}

double quotient_growth(const std::vector<ModulusRow>& rows, double beta) {
    if (rows.size() < 2) throw std::invalid_argument("quotient_growth: need >= 2 rows");
    const std::vector<double> q = modulus_quotients(rows, beta);
    if (q.front() == 0.0) return 0.0;
    return q.back() / q.front();
}

}  // namespace hyperlin::holder
