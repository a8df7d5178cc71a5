#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "hyperlin/funceq.hpp"
#include "hyperlin/geometry.hpp"
#include "hyperlin/maps.hpp"

namespace hyperlin::whitney {

// First-order jet (value and both partials) prescribed on the coordinate
// cross ([-radius,radius] x {0}) u ({0} x [-radius,radius]).
struct JetOnCross {
    double radius = 0.1;
    double alpha = 1.0;
    // x1-axis branch, argument is x1
    std::function<double(double)> value_x1, d1_x1, d2_x1;
    // x2-axis branch, argument is x2
    std::function<double(double)> value_x2, d1_x2, d2_x2;

    // evaluation on the cross; points off the cross are a contract violation
    double h00(const Vec2& p) const;
    double h10(const Vec2& p) const;
    double h01(const Vec2& p) const;

    void check_origin_consistency(double tol = 1e-9) const;
};

// Jets of the two components of the straightening map built from the axis
// functional-equation solutions: the first component integrates j11 along
// the x1-axis, the second mirrors it.
struct PsiStarJets {
    JetOnCross first;
    JetOnCross second;
};
PsiStarJets jet_from_axis_data(const funceq::AxisJets& p, const funceq::AxisJets& q,
                               double radius, double alpha);

// Taylor-remainder bounds over sampled cross pairs, split by pair location:
// 0 both on the x2-axis, 1 mixed (x on x2), 2 mixed (x on x1), 3 both on x1.
struct WhitneyCheck {
    struct Case {
        double r00_ratio = 0.0;  // |R00| / |x-y|^{1+alpha}
        double r10_ratio = 0.0;  // |R10| / |x-y|^alpha
        double r01_ratio = 0.0;
        long count = 0;
        bool finite = true;
    };
    std::array<Case, 4> cases;
    bool all_finite() const {
        for (const auto& c : cases)
            if (!c.finite) return false;
        return true;
    }
};
WhitneyCheck check_whitney_conditions(const JetOnCross& jet, long pair_budget = 10000,
                                      std::uint64_t seed = 2026);

class Extension;  // dyadic-cube extension machinery

struct ExtensionField {
    ScalarField2D value;
    VectorField2D gradient;
    long cube_count = 0;
    double attained_holder_constant = 0.0;
    std::shared_ptr<const Extension> extension;

    double eval(const Vec2& p) const;
    Vec2 grad(const Vec2& p) const;
    // normalized partition weights of the cubes active at p (off the cross)
    std::vector<double> partition_weights(const Vec2& p) const;
};

// First-order Whitney extension: dyadic cube decomposition of the complement
// of the cross, 9/8-inflated smooth partition of unity, per-cube first-order
// polynomial anchored at a nearest cross point. Restriction to the cross
// reproduces the jets.
ExtensionField whitney_extend(const JetOnCross& jet, const GridSpec& target_grid,
                              double alpha);

struct PsiStarVerification {
    double axis_value_residual = 0.0;   // conjugated map vs (l1 x1,0)/(0,l2 x2)
    double axis_deriv_residual = 0.0;   // conjugated derivative vs Lambda
    double origin_jacobian_defect = 0.0;
    int newton_failures = 0;
};

struct PsiStarResult {
    maps::PlanarMap psi_star;
    PsiStarVerification verification;
};

// Assembles the planar straightening map from the two extensions and checks
// linearity of the conjugated map along both axes.
PsiStarResult assemble_psi_star(const ExtensionField& first,
                                const ExtensionField& second,
                                const maps::PlanarMap& map, double sample_radius);

}  // namespace hyperlin::whitney
