#include <mats/regret.hpp>

#include <algorithm>

namespace mats {
    Regret::Regret(MamabSpec spec, FactorTables trueMeans) :
            spec_(std::move(spec)), means_(std::move(trueMeans))
    {
        validate(spec_);
        validateTables(spec_, means_, false);
        optimum_ = variableElimination(means_, spec_);
    }

    double Regret::delta(const JointArm & arm) const {
        return regretDelta(means_, arm, spec_, optimum_);
    }

    double regretDelta(const FactorTables & trueMeans, const JointArm & arm,
                       const MamabSpec & spec, const MaxResult & optimum) {
        // VE compares partial sums in its own order, so an arm that ties the
        // optimum can come out one ulp above it; clamp rather than go negative.
        return std::max(0.0, optimum.value - globalMean(trueMeans, arm, spec));
    }
}
