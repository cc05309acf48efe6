#ifndef MATS_ENVIRONMENTS_HEADER_FILE
#define MATS_ENVIRONMENTS_HEADER_FILE

#include <string>

#include <json.hpp>

#include <mats/posteriors.hpp>
#include <mats/regret.hpp>

namespace mats {
    /**
     * @brief A stochastic MAMAB instance with known means.
     *
     * Local distributions are parametrized in unscaled units (success
     * probability, Poisson rate, Normal mean and standard deviation) and
     * every emitted reward is divided by scale(). trueMeans() are the
     * scaled means; the optimal arm is computed once at construction.
     */
    class Environment {
        public:
            Environment(std::string name, MamabSpec spec, std::vector<RewardModel> kinds,
                        FactorTables params, FactorTables stddevs, double scale,
                        double rewardRange, nlohmann::json metadata = nlohmann::json::object());

            /// One independent scaled draw per group, in group order.
            std::vector<double> sampleRewards(const JointArm & arm, RandomEngine & rng) const;

            const std::string & name() const { return name_; }
            const MamabSpec & spec() const { return spec_; }
            const std::vector<RewardModel> & kinds() const { return kinds_; }
            const FactorTables & params() const { return params_; }
            const FactorTables & stddevs() const { return stddevs_; }
            const FactorTables & trueMeans() const { return regret_.trueMeans(); }
            double scale() const { return scale_; }

            /// Width of the unscaled reward range used to derive UCB's sigma.
            double rewardRange() const { return rewardRange_; }

            /// Default subgaussian scale of the emitted rewards: range / (2 * scale).
            double defaultSigma() const { return rewardRange_ / (2.0 * scale_); }

            const nlohmann::json & metadata() const { return metadata_; }
            const Regret & regret() const { return regret_; }
            const MaxResult & optimum() const { return regret_.optimum(); }

        private:
            std::string name_;
            MamabSpec spec_;
            std::vector<RewardModel> kinds_;
            FactorTables params_;
            FactorTables stddevs_;
            double scale_;
            double rewardRange_;
            nlohmann::json metadata_;
            Regret regret_;
    };

    /**
     * @brief Bernoulli 0101-Chain with n agents and n - 1 pairwise groups.
     *
     * Even groups use the table
     *     a_i\a_{i+1}   0     1
     *         0        0.75  1.0
     *         1        0.25  0.9
     * and odd groups its transpose. Rewards are divided by n - 1.
     */
    Environment bernoulliChain(std::size_t agents);

    /// Poisson 0101-Chain: as the Bernoulli chain with rates 0.1, 0.3 / 0.2, 0.1.
    Environment poissonChain(std::size_t agents);

    /**
     * @brief Random Gem Mining instance.
     *
     * Draw order from rng: for each village its population in [1..5], then
     * (except for the last village, which always reaches 4 mines) its number
     * of reachable mines in [2..4]; then one base probability in [0, 0.5)
     * per mine. A mine with w workers finds a gem with probability
     * 1.03^(w-1) * p, and never when nobody works there.
     */
    Environment gemMining(std::size_t villages, RandomEngine & rng);

    /// Convenience overload seeding a fresh engine.
    Environment gemMining(std::size_t villages, std::uint64_t seed);

    const char * toString(RewardModel model);
    RewardModel rewardModelFromString(const std::string & name);

    nlohmann::json specToJson(const MamabSpec & spec);

    /// Parses and validates the structural part of a problem file.
    MamabSpec specFromJson(const nlohmann::json & j);

    /**
     * @brief Problem-file form of an environment.
     *
     * Schema:
     *     { "name": str, "agents": m, "action_counts": [..], "groups": [[..], ..],
     *       "scale": s, "reward_range": r,
     *       "distributions": [ { "kind": "bernoulli"|"poisson"|"normal",
     *                            "params": [one per local arm],
     *                            "stddev": [one per local arm, normal only] } ],
     *       "metadata": {..} }
     * "scale" defaults to the number of groups and "reward_range" to 1.
     */
    nlohmann::json environmentToJson(const Environment & env);
    Environment environmentFromJson(const nlohmann::json & j);
}

#endif
