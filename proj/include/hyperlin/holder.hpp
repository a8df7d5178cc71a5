#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hyperlin/geometry.hpp"

namespace hyperlin::holder {

struct SamplerConfig {
    std::uint64_t seed = 20210607;
    long pairs_per_bin = 10000;
    double quantile = 0.95;  // envelope quantile; 1.0 = max
    int min_scales = 4;      // required dyadic distance scales
};

struct HolderEstimate {
    double beta_hat = 0.0;
    double constant_hat = 0.0;
    double regression_r2 = 0.0;
    long pair_count = 0;
    int distance_decades = 0;  // dyadic distance scales spanned by the fit
    bool degenerate = false;   // constant field: envelope identically ~0
    std::vector<double> bin_distance;
    std::vector<double> bin_envelope;
};

// Dyadic-distance pair sampling of |field(x)-field(y)| with a per-bin
// envelope quantile; beta is the log-log slope, capped at 1.
HolderEstimate estimate_holder_exponent(const MatrixField2D& field,
                                        const SamplerConfig& cfg = {});

struct ModulusRow {
    double distance = 0.0;
    double diff_norm = 0.0;  // |D(x) - D(anchor)|
};

// Pointwise modulus along a ray from the anchor: rows of (distance, |dD|).
std::vector<ModulusRow> local_modulus(const std::function<Mat2(const Vec2&)>& dphi,
                                      const Vec2& anchor, const Vec2& direction,
                                      const std::vector<double>& levels);

// Same but interpolating a sampled field.
std::vector<ModulusRow> local_modulus(const MatrixField2D& field, const Vec2& anchor,
                                      const Vec2& direction,
                                      const std::vector<double>& levels);

// quotient table diff / distance^beta for a candidate exponent
std::vector<double> modulus_quotients(const std::vector<ModulusRow>& rows, double beta);

// ratio of last to first quotient: > 1 signals blow-up at this beta
double quotient_growth(const std::vector<ModulusRow>& rows, double beta);

}  // namespace hyperlin::holder
