#include <mats/posteriors.hpp>

#include <cmath>

namespace mats {
    namespace {
        constexpr double kSupportTolerance = 1e-9;

        bool nearInteger(const double x, double & rounded) {
            rounded = std::round(x);
            return std::abs(x - rounded) <= kSupportTolerance * std::max(1.0, std::abs(x));
        }

        // Scaled reward back to the likelihood's native support.
        double unscale(const RewardModel model, const double reward, const double scale) {
            return model == RewardModel::Normal ? reward : reward * scale;
        }
    }

    PosteriorState priorState(const RewardModel model) {
        switch (model) {
            case RewardModel::Bernoulli: return BetaBernoulliState{};
            case RewardModel::Poisson:   return GammaPoissonState{};
            case RewardModel::Normal:    return NormalJeffreysState{};
        }
        throw SpecError(SpecError::Kind::InvalidValue, "unknown reward model");
    }

    void observe(BetaBernoulliState & state, const double x) {
        double r;
        if (!std::isfinite(x) || !nearInteger(x, r) || (r != 0.0 && r != 1.0))
            throw SpecError(SpecError::Kind::SupportViolation,
                            "Bernoulli observation " + std::to_string(x) + " is not 0 or 1");
        if (r == 1.0) state.alpha += 1.0;
        else          state.beta += 1.0;
    }

    void observe(GammaPoissonState & state, const double x) {
        double r;
        if (!std::isfinite(x) || !nearInteger(x, r) || r < 0.0)
            throw SpecError(SpecError::Kind::SupportViolation,
                            "Poisson observation " + std::to_string(x) + " is not a nonnegative integer");
        state.shape += r;
        state.count += 1;
        state.rate = static_cast<double>(state.count);
    }

    void observe(NormalJeffreysState & state, const double x) {
        if (!std::isfinite(x))
            throw SpecError(SpecError::Kind::SupportViolation, "Normal observation is not finite");
        state.n += 1;
        const double d = x - state.mean;
        state.mean += d / static_cast<double>(state.n);
        state.m2 += d * (x - state.mean);
    }

    double sampleBeta(const double alpha, const double beta, RandomEngine & rng) {
        const double x = std::gamma_distribution<double>(alpha, 1.0)(rng);
        const double y = std::gamma_distribution<double>(beta, 1.0)(rng);
        const double s = x + y;
        // Both draws can underflow for tiny shapes; fall back to the mean.
        if (s == 0.0) return alpha / (alpha + beta);
        return x / s;
    }

    double sampleMean(const BetaBernoulliState & state, RandomEngine & rng) {
        return sampleBeta(state.alpha, state.beta, rng);
    }

    double sampleMean(const GammaPoissonState & state, RandomEngine & rng) {
        if (state.count == 0) return kInfinity;
        return std::gamma_distribution<double>(state.shape, 1.0 / state.rate)(rng);
    }

    double sampleMean(const NormalJeffreysState & state, RandomEngine & rng) {
        if (state.n < 2) return kInfinity;
        const double n = static_cast<double>(state.n);
        const double t = std::student_t_distribution<double>(n - 1.0)(rng);
        return state.mean + t * std::sqrt(state.m2 / (n * (n - 1.0)));
    }

    PosteriorBank::PosteriorBank(const MamabSpec & spec, const RewardModel model, const double scale) :
            PosteriorBank(spec, std::vector<RewardModel>(spec.groups.size(), model), scale) {}

    PosteriorBank::PosteriorBank(const MamabSpec & spec, std::vector<RewardModel> models, const double scale) :
            spec_(spec), models_(std::move(models)), scale_(scale)
    {
        validate(spec_);
        if (models_.size() != spec_.groups.size())
            throw SpecError(SpecError::Kind::TableSizeMismatch, "expected one reward model per group");
        if (!(scale_ > 0.0) || !std::isfinite(scale_))
            throw SpecError(SpecError::Kind::InvalidValue, "reward scale must be positive");

        means_ = zeroTables(spec_);
        for (std::size_t e = 0; e < spec_.groups.size(); ++e) {
            const auto size = localArmCount(spec_, e);
            states_.emplace_back(size, priorState(models_[e]));
            counts_.emplace_back(size, 0);
        }
    }

    void PosteriorBank::update(const std::size_t e, const std::size_t a, const double reward) {
        const double x = unscale(models_[e], reward, scale_);
        std::visit([x](auto & s) { observe(s, x); }, states_[e][a]);

        const auto n = ++counts_[e][a];
        auto & mu = means_[e][static_cast<Eigen::Index>(a)];
        mu += (reward - mu) / static_cast<double>(n);
    }

    void PosteriorBank::update(const JointArm & arm, const std::vector<double> & rewards) {
        if (rewards.size() != spec_.groups.size())
            throw SpecError(SpecError::Kind::InvalidSize, "expected one reward per group");
        for (std::size_t e = 0; e < rewards.size(); ++e)
            update(e, project(arm, spec_, e), rewards[e]);
    }

    double PosteriorBank::sampleMean(const std::size_t e, const std::size_t a, RandomEngine & rng) const {
        const double draw = std::visit([&rng](const auto & s) { return mats::sampleMean(s, rng); }, states_[e][a]);
        if (models_[e] == RewardModel::Normal) return draw;
        return draw / scale_;
    }

    FactorTables PosteriorBank::sampleTables(RandomEngine & rng) const {
        FactorTables tables;
        tables.reserve(states_.size());
        for (std::size_t e = 0; e < states_.size(); ++e) {
            Vector t(static_cast<Eigen::Index>(states_[e].size()));
            for (std::size_t a = 0; a < states_[e].size(); ++a)
                t[static_cast<Eigen::Index>(a)] = sampleMean(e, a, rng);
            tables.push_back(std::move(t));
        }
        return tables;
    }

    double PosteriorBank::ucbScore(const std::size_t e, const std::size_t a, const double sigma, const double delta) const {
        const auto n = counts_[e][a];
        if (n == 0) return kInfinity;
        const double width = std::sqrt(2.0 * sigma * sigma * std::log(1.0 / delta) / static_cast<double>(n));
        return mean(e, a) + width;
    }

    void PosteriorBank::set(const std::size_t e, const std::size_t a, PosteriorState state,
                            const std::size_t count, const double mean) {
        if (state.index() != priorState(models_[e]).index())
            throw SpecError(SpecError::Kind::InvalidValue, "state does not match the group's reward model");
        states_[e][a] = std::move(state);
        counts_[e][a] = count;
        means_[e][static_cast<Eigen::Index>(a)] = mean;
    }

    PosteriorBank batchFit(const MamabSpec & spec, const std::vector<RewardModel> & models,
                           const double scale, const Observations & observations) {
        PosteriorBank bank(spec, models, scale);
        if (observations.size() != spec.groups.size())
            throw SpecError(SpecError::Kind::InvalidSize, "expected observations for every group");

        for (std::size_t e = 0; e < observations.size(); ++e) {
            if (observations[e].size() != localArmCount(spec, e))
                throw SpecError(SpecError::Kind::InvalidSize, "expected observations for every local arm");

            for (std::size_t a = 0; a < observations[e].size(); ++a) {
                const auto & xs = observations[e][a];
                if (xs.empty()) continue;
                const double n = static_cast<double>(xs.size());

                double sum = 0.0;
                for (const double x : xs) {
                    if (!std::isfinite(x))
                        throw SpecError(SpecError::Kind::SupportViolation, "observation is not finite");
                    sum += x;
                }
                const double scaledMean = sum / n;

                PosteriorState state = priorState(models[e]);
                switch (models[e]) {
                    case RewardModel::Bernoulli: {
                        double successes = 0.0;
                        for (const double x : xs) {
                            double r;
                            if (!nearInteger(x * scale, r) || (r != 0.0 && r != 1.0))
                                throw SpecError(SpecError::Kind::SupportViolation, "Bernoulli observation out of support");
                            successes += r;
                        }
                        state = BetaBernoulliState{0.5 + successes, 0.5 + (n - successes)};
                        break;
                    }
                    case RewardModel::Poisson: {
                        double total = 0.0;
                        for (const double x : xs) {
                            double r;
                            if (!nearInteger(x * scale, r) || r < 0.0)
                                throw SpecError(SpecError::Kind::SupportViolation, "Poisson observation out of support");
                            total += r;
                        }
                        state = GammaPoissonState{0.5 + total, n, xs.size()};
                        break;
                    }
                    case RewardModel::Normal: {
                        double m2 = 0.0;
                        for (const double x : xs)
                            m2 += (x - scaledMean) * (x - scaledMean);
                        state = NormalJeffreysState{xs.size(), scaledMean, m2};
                        break;
                    }
                }
                bank.set(e, a, std::move(state), xs.size(), scaledMean);
            }
        }
        return bank;
    }
}
