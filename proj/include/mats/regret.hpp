#ifndef MATS_REGRET_HEADER_FILE
#define MATS_REGRET_HEADER_FILE

#include <mats/maximizer.hpp>

namespace mats {
    /**
     * @brief Expected regret of joint arms against a fixed set of true means.
     *
     * The optimal arm is computed once, by variable elimination, at
     * construction and reused for every query.
     */
    class Regret {
        public:
            Regret(MamabSpec spec, FactorTables trueMeans);

            /// mu(a_*) - mu(arm), never negative.
            double delta(const JointArm & arm) const;

            const MaxResult & optimum() const { return optimum_; }
            const FactorTables & trueMeans() const { return means_; }

        private:
            MamabSpec spec_;
            FactorTables means_;
            MaxResult optimum_;
    };

    /// Stateless form of Regret::delta for a precomputed optimum.
    double regretDelta(const FactorTables & trueMeans, const JointArm & arm,
                       const MamabSpec & spec, const MaxResult & optimum);
}

#endif
