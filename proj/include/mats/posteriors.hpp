#ifndef MATS_POSTERIORS_HEADER_FILE
#define MATS_POSTERIORS_HEADER_FILE

#include <variant>

#include <mats/model.hpp>

namespace mats {
    enum class RewardModel { Bernoulli, Poisson, Normal };

    /// Beta posterior over a success probability; Jeffreys prior is (0.5, 0.5).
    struct BetaBernoulliState {
        double alpha = 0.5;
        double beta = 0.5;

        bool operator==(const BetaBernoulliState &) const = default;
    };

    /**
     * @brief Gamma posterior over a Poisson rate; Jeffreys prior is (0.5, 0).
     *
     * shape = 0.5 + sum of observed counts, rate = number of observations.
     * The posterior is improper until at least one observation.
     */
    struct GammaPoissonState {
        double shape = 0.5;
        double rate = 0.0;
        std::size_t count = 0;

        bool operator==(const GammaPoissonState &) const = default;
    };

    /**
     * @brief Normal likelihood with unknown mean and variance under the
     * Jeffreys prior; the marginal posterior on the mean is a location-scale
     * Student-t with n - 1 degrees of freedom. Needs n >= 2 to be proper.
     */
    struct NormalJeffreysState {
        std::size_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;

        bool operator==(const NormalJeffreysState &) const = default;
    };

    using PosteriorState = std::variant<BetaBernoulliState, GammaPoissonState, NormalJeffreysState>;

    PosteriorState priorState(RewardModel model);

    // Conjugate updates on an unscaled observation. Throw
    // SpecError(SupportViolation) for values outside the likelihood support.
    void observe(BetaBernoulliState & state, double x);
    void observe(GammaPoissonState & state, double x);
    void observe(NormalJeffreysState & state, double x);

    /// Beta draw via the ratio of two Gamma draws; valid for any positive shapes.
    double sampleBeta(double alpha, double beta, RandomEngine & rng);

    // Posterior draws of the (unscaled) mean. Improper posteriors give +inf.
    double sampleMean(const BetaBernoulliState & state, RandomEngine & rng);
    double sampleMean(const GammaPoissonState & state, RandomEngine & rng);
    double sampleMean(const NormalJeffreysState & state, RandomEngine & rng);

    /**
     * @brief Posterior statistics for every (group, local arm) pair.
     *
     * Rewards arriving here are already divided by the environment's scale
     * (the number of groups in the benchmarks). Bernoulli and Poisson
     * observations are multiplied back by the scale before the conjugate
     * update so the likelihood stays exact, and posterior draws are divided
     * by it again. Normal observations are modelled as-is.
     *
     * Next to the model state the bank keeps, per local arm, the pull
     * counter and the running mean of the scaled rewards.
     */
    class PosteriorBank {
        public:
            PosteriorBank(const MamabSpec & spec, RewardModel model, double scale = 1.0);
            PosteriorBank(const MamabSpec & spec, std::vector<RewardModel> models, double scale = 1.0);

            /// Records one scaled reward for local arm a of group e.
            void update(std::size_t e, std::size_t a, double reward);

            /// Records one reward per group for the pulled joint arm.
            void update(const JointArm & arm, const std::vector<double> & rewards);

            /// Posterior draw of the scaled mean of local arm a of group e.
            double sampleMean(std::size_t e, std::size_t a, RandomEngine & rng) const;

            /// One draw per local arm, group-major then local-arm-minor.
            FactorTables sampleTables(RandomEngine & rng) const;

            /**
             * @brief Running mean plus the confidence width
             * sqrt(2 sigma^2 log(1/delta) / n); +inf for unpulled arms.
             */
            double ucbScore(std::size_t e, std::size_t a, double sigma, double delta) const;

            /// Overwrites the statistics of one local arm.
            void set(std::size_t e, std::size_t a, PosteriorState state, std::size_t count, double mean);

            const MamabSpec & spec() const { return spec_; }
            RewardModel model(std::size_t e) const { return models_[e]; }
            double scale() const { return scale_; }
            const PosteriorState & state(std::size_t e, std::size_t a) const { return states_[e][a]; }
            std::size_t count(std::size_t e, std::size_t a) const { return counts_[e][a]; }
            double mean(std::size_t e, std::size_t a) const { return means_[e][static_cast<Eigen::Index>(a)]; }
            const FactorTables & means() const { return means_; }

        private:
            MamabSpec spec_;
            std::vector<RewardModel> models_;
            double scale_;
            std::vector<std::vector<PosteriorState>> states_;
            std::vector<std::vector<std::size_t>> counts_;
            FactorTables means_;
    };

    /// Observations per group, per local arm, in arrival order.
    using Observations = std::vector<std::vector<std::vector<double>>>;

    /**
     * @brief Builds a bank from full observation lists in closed form
     * (sums and two-pass deviations) rather than by folding updates.
     */
    PosteriorBank batchFit(const MamabSpec & spec, const std::vector<RewardModel> & models,
                           double scale, const Observations & observations);
}

#endif
