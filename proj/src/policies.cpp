#include <mats/policies.hpp>

#include <cmath>

namespace mats {
    const char * toString(const PolicyKind kind) {
        switch (kind) {
            case PolicyKind::Mats:        return "mats";
            case PolicyKind::FactoredUcb: return "factored_ucb";
            case PolicyKind::Scql:        return "scql";
            case PolicyKind::Random:      return "random";
        }
        return "unknown";
    }

    PolicyKind policyKindFromString(const std::string & name) {
        if (name == "mats")                           return PolicyKind::Mats;
        if (name == "factored_ucb" || name == "ucb")  return PolicyKind::FactoredUcb;
        if (name == "scql")                           return PolicyKind::Scql;
        if (name == "random" || name == "rnd")        return PolicyKind::Random;
        throw SpecError(SpecError::Kind::Config, "unknown policy '" + name + "'");
    }

    void PolicyConfig::check() const {
        if (sigma && (!std::isfinite(*sigma) || *sigma < 0.0))
            throw SpecError(SpecError::Kind::Config, "sigma must be finite and nonnegative");
        if (delta && !(*delta > 0.0 && *delta <= 1.0))
            throw SpecError(SpecError::Kind::Config, "delta must lie in (0, 1]");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw SpecError(SpecError::Kind::Config, "epsilon must lie in [0, 1]");
        if (!(epsilonDecay > 0.0 && epsilonDecay <= 1.0))
            throw SpecError(SpecError::Kind::Config, "epsilon decay must lie in (0, 1]");
        if (!(learningRate > 0.0 && learningRate <= 1.0))
            throw SpecError(SpecError::Kind::Config, "learning rate must lie in (0, 1]");
    }

    double scheduledDelta(const std::size_t totalLocalArms, const std::size_t t) {
        const double at = static_cast<double>(totalLocalArms) * static_cast<double>(t);
        return 1.0 / (at * at);
    }

    JointArm matsSelect(const PosteriorBank & bank, const EliminationOrder & order, RandomEngine & rng) {
        return variableElimination(bank.sampleTables(rng), bank.spec(), order).arm;
    }

    FactorTables ucbTables(const PosteriorBank & bank, const double sigma, const double delta) {
        auto tables = zeroTables(bank.spec());
        for (std::size_t e = 0; e < tables.size(); ++e)
            for (Eigen::Index a = 0; a < tables[e].size(); ++a)
                tables[e][a] = bank.ucbScore(e, static_cast<std::size_t>(a), sigma, delta);
        return tables;
    }

    JointArm ucbSelect(const PosteriorBank & bank, const EliminationOrder & order, const double sigma, const double delta) {
        return variableElimination(ucbTables(bank, sigma, delta), bank.spec(), order).arm;
    }

    JointArm randomSelect(const MamabSpec & spec, RandomEngine & rng) {
        JointArm arm(spec.numAgents);
        for (std::size_t i = 0; i < spec.numAgents; ++i)
            arm[i] = std::uniform_int_distribution<std::size_t>(0, spec.actionCounts[i] - 1)(rng);
        return arm;
    }

    JointArm scqlSelect(const FactorTables & q, const MamabSpec & spec, const EliminationOrder & order,
                        const double epsilon, RandomEngine & rng) {
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon)
            return randomSelect(spec, rng);
        return variableElimination(q, spec, order).arm;
    }

    void scqlUpdate(FactorTables & q, const MamabSpec & spec, const JointArm & arm,
                    const std::vector<double> & rewards, const double learningRate) {
        for (std::size_t e = 0; e < q.size(); ++e) {
            auto & v = q[e][static_cast<Eigen::Index>(project(arm, spec, e))];
            v += learningRate * (rewards[e] - v);
        }
    }

    // ---- MATS ----

    MatsPolicy::MatsPolicy(const MamabSpec & spec, std::vector<RewardModel> models, const double scale) :
            bank_(spec, std::move(models), scale), order_(chooseOrder(spec)) {}

    MatsPolicy::MatsPolicy(const Environment & env) :
            MatsPolicy(env.spec(), env.kinds(), env.scale()) {}

    JointArm MatsPolicy::select(std::size_t, RandomEngine & rng) {
        return matsSelect(bank_, order_, rng);
    }

    void MatsPolicy::observe(const JointArm & arm, const std::vector<double> & rewards) {
        bank_.update(arm, rewards);
    }

    // ---- Factored UCB ----

    FactoredUcbPolicy::FactoredUcbPolicy(const MamabSpec & spec, const double sigma, const std::optional<double> delta) :
            bank_(spec, RewardModel::Normal), order_(chooseOrder(spec)), sigma_(sigma), delta_(delta),
            localArms_(totalLocalArms(spec)) {}

    JointArm FactoredUcbPolicy::select(const std::size_t t, RandomEngine &) {
        const double delta = delta_ ? *delta_ : scheduledDelta(localArms_, t);
        return ucbSelect(bank_, order_, sigma_, delta);
    }

    void FactoredUcbPolicy::observe(const JointArm & arm, const std::vector<double> & rewards) {
        bank_.update(arm, rewards);
    }

    // ---- SCQL ----

    ScqlPolicy::ScqlPolicy(const MamabSpec & spec, const double epsilon, const double epsilonDecay,
                           const double learningRate) :
            spec_(spec), order_(chooseOrder(spec)), q_(zeroTables(spec)), epsilon_(epsilon),
            decay_(epsilonDecay), learningRate_(learningRate) {}

    double ScqlPolicy::epsilon(const std::size_t t) const {
        return epsilon_ * std::pow(decay_, static_cast<double>(t > 0 ? t - 1 : 0));
    }

    JointArm ScqlPolicy::select(const std::size_t t, RandomEngine & rng) {
        return scqlSelect(q_, spec_, order_, epsilon(t), rng);
    }

    void ScqlPolicy::observe(const JointArm & arm, const std::vector<double> & rewards) {
        scqlUpdate(q_, spec_, arm, rewards, learningRate_);
    }

    // ---- Random / fixed ----

    RandomPolicy::RandomPolicy(MamabSpec spec) : spec_(std::move(spec)) {}

    JointArm RandomPolicy::select(std::size_t, RandomEngine & rng) {
        return randomSelect(spec_, rng);
    }

    FixedArmPolicy::FixedArmPolicy(JointArm arm, std::string name) :
            arm_(std::move(arm)), name_(std::move(name)) {}

    std::unique_ptr<Policy> makePolicy(const PolicyConfig & config, const Environment & env) {
        config.check();
        switch (config.kind) {
            case PolicyKind::Mats:
                return std::make_unique<MatsPolicy>(env);
            case PolicyKind::FactoredUcb:
                return std::make_unique<FactoredUcbPolicy>(env.spec(), config.sigma.value_or(env.defaultSigma()), config.delta);
            case PolicyKind::Scql:
                return std::make_unique<ScqlPolicy>(env.spec(), config.epsilon, config.epsilonDecay, config.learningRate);
            case PolicyKind::Random:
                return std::make_unique<RandomPolicy>(env.spec());
        }
        throw SpecError(SpecError::Kind::Config, "unknown policy kind");
    }
}
