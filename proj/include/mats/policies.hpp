#ifndef MATS_POLICIES_HEADER_FILE
#define MATS_POLICIES_HEADER_FILE

#include <memory>
#include <optional>
#include <string>

#include <mats/environments.hpp>
#include <mats/maximizer.hpp>
#include <mats/posteriors.hpp>

namespace mats {
    enum class PolicyKind { Mats, FactoredUcb, Scql, Random };

    const char * toString(PolicyKind kind);
    PolicyKind policyKindFromString(const std::string & name);

    struct PolicyConfig {
        PolicyKind kind = PolicyKind::Mats;

        /// Subgaussian scale for factored UCB; defaults to the environment's.
        std::optional<double> sigma;
        /// Fixed confidence level for factored UCB; unset means (A t)^-2.
        std::optional<double> delta;

        /// SCQL: initial exploration rate and its per-step decay factor.
        double epsilon = 0.1;
        double epsilonDecay = 0.9999;
        /// SCQL learning rate, in (0, 1].
        double learningRate = 0.1;

        /// Throws SpecError(Config) on out-of-range parameters.
        void check() const;
    };

    /// Confidence level (A t)^-2, with A the total number of local arms.
    double scheduledDelta(std::size_t totalLocalArms, std::size_t t);

    /**
     * @brief Thompson sampling step: one posterior draw per local arm,
     * group-major, then the exact argmax of the sampled sum.
     */
    JointArm matsSelect(const PosteriorBank & bank, const EliminationOrder & order, RandomEngine & rng);

    /// Argmax of sum_e mean + sqrt(2 sigma^2 log(1/delta) / n) over local arms.
    JointArm ucbSelect(const PosteriorBank & bank, const EliminationOrder & order, double sigma, double delta);

    /// Per-group UCB score tables, as maximized by ucbSelect.
    FactorTables ucbTables(const PosteriorBank & bank, double sigma, double delta);

    /**
     * @brief Epsilon-greedy over local Q-tables: with probability epsilon a
     * uniformly random joint arm, otherwise the exact argmax of the Q sum.
     */
    JointArm scqlSelect(const FactorTables & q, const MamabSpec & spec, const EliminationOrder & order,
                        double epsilon, RandomEngine & rng);

    /// Stateless Q update Q <- Q + alpha (r - Q) on every pulled local arm.
    void scqlUpdate(FactorTables & q, const MamabSpec & spec, const JointArm & arm,
                    const std::vector<double> & rewards, double learningRate);

    /// Each agent's action uniform and independent.
    JointArm randomSelect(const MamabSpec & spec, RandomEngine & rng);

    /**
     * @brief A stateful arm-selection strategy confined to one run.
     *
     * Time steps start at 1. select() is always followed by observe() with
     * the local rewards of the selected arm.
     */
    class Policy {
        public:
            virtual ~Policy() = default;

            virtual JointArm select(std::size_t t, RandomEngine & rng) = 0;
            virtual void observe(const JointArm & arm, const std::vector<double> & rewards) = 0;
            virtual std::string name() const = 0;
    };

    class MatsPolicy : public Policy {
        public:
            MatsPolicy(const MamabSpec & spec, std::vector<RewardModel> models, double scale);
            explicit MatsPolicy(const Environment & env);

            JointArm select(std::size_t t, RandomEngine & rng) override;
            void observe(const JointArm & arm, const std::vector<double> & rewards) override;
            std::string name() const override { return "mats"; }

            const PosteriorBank & bank() const { return bank_; }

        private:
            PosteriorBank bank_;
            EliminationOrder order_;
    };

    class FactoredUcbPolicy : public Policy {
        public:
            /// delta unset selects the (A t)^-2 schedule.
            FactoredUcbPolicy(const MamabSpec & spec, double sigma, std::optional<double> delta);

            JointArm select(std::size_t t, RandomEngine & rng) override;
            void observe(const JointArm & arm, const std::vector<double> & rewards) override;
            std::string name() const override { return "factored_ucb"; }

            const PosteriorBank & bank() const { return bank_; }

        private:
            // Only counters and running means are used; the model state is
            // Normal because it accepts any real reward.
            PosteriorBank bank_;
            EliminationOrder order_;
            double sigma_;
            std::optional<double> delta_;
            std::size_t localArms_;
    };

    class ScqlPolicy : public Policy {
        public:
            ScqlPolicy(const MamabSpec & spec, double epsilon, double epsilonDecay, double learningRate);

            JointArm select(std::size_t t, RandomEngine & rng) override;
            void observe(const JointArm & arm, const std::vector<double> & rewards) override;
            std::string name() const override { return "scql"; }

            const FactorTables & q() const { return q_; }
            double epsilon(std::size_t t) const;

        private:
            MamabSpec spec_;
            EliminationOrder order_;
            FactorTables q_;
            double epsilon_, decay_, learningRate_;
    };

    class RandomPolicy : public Policy {
        public:
            explicit RandomPolicy(MamabSpec spec);

            JointArm select(std::size_t t, RandomEngine & rng) override;
            void observe(const JointArm &, const std::vector<double> &) override {}
            std::string name() const override { return "random"; }

        private:
            MamabSpec spec_;
    };

    /// Always plays a fixed arm; used as a zero-regret reference.
    class FixedArmPolicy : public Policy {
        public:
            FixedArmPolicy(JointArm arm, std::string name = "oracle");

            JointArm select(std::size_t, RandomEngine &) override { return arm_; }
            void observe(const JointArm &, const std::vector<double> &) override {}
            std::string name() const override { return name_; }

        private:
            JointArm arm_;
            std::string name_;
    };

    std::unique_ptr<Policy> makePolicy(const PolicyConfig & config, const Environment & env);
}

#endif
