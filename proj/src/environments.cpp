#include <mats/environments.hpp>

#include <cmath>

namespace mats {
    namespace {
        FactorTables scaled(const FactorTables & params, const double scale) {
            FactorTables retval;
            retval.reserve(params.size());
            for (const auto & p : params) retval.push_back(p / scale);
            return retval;
        }

        void checkParams(const MamabSpec & spec, const std::vector<RewardModel> & kinds,
                         const FactorTables & params, const FactorTables & stddevs) {
            validateTables(spec, params, false);
            if (kinds.size() != spec.groups.size() || stddevs.size() != spec.groups.size())
                throw SpecError(SpecError::Kind::TableSizeMismatch, "expected one distribution per group");

            for (std::size_t e = 0; e < kinds.size(); ++e) {
                const std::string where = "group " + std::to_string(e);
                switch (kinds[e]) {
                    case RewardModel::Bernoulli:
                        if ((params[e].array() < 0.0).any() || (params[e].array() > 1.0).any())
                            throw SpecError(SpecError::Kind::InvalidValue, where + ": success probability outside [0, 1]");
                        break;
                    case RewardModel::Poisson:
                        if ((params[e].array() < 0.0).any())
                            throw SpecError(SpecError::Kind::InvalidValue, where + ": negative Poisson rate");
                        break;
                    case RewardModel::Normal:
                        if (stddevs[e].size() != params[e].size())
                            throw SpecError(SpecError::Kind::TableSizeMismatch, where + ": needs one stddev per local arm");
                        if (!stddevs[e].allFinite() || (stddevs[e].array() < 0.0).any())
                            throw SpecError(SpecError::Kind::InvalidValue, where + ": invalid stddev");
                        break;
                }
            }
        }

        Vector table(std::initializer_list<double> values) {
            Vector v(static_cast<Eigen::Index>(values.size()));
            Eigen::Index i = 0;
            for (const double x : values) v[i++] = x;
            return v;
        }

        Environment chain(const std::string & name, const std::size_t agents, const RewardModel kind,
                          const Vector & even) {
            if (agents < 2)
                throw SpecError(SpecError::Kind::InvalidSize, name + " needs at least 2 agents");

            // Transpose of a 2x2 table under first-agent-major indexing.
            const Vector odd = table({even[0], even[2], even[1], even[3]});

            MamabSpec spec;
            spec.numAgents = agents;
            spec.actionCounts.assign(agents, 2);
            FactorTables params;
            for (std::size_t i = 0; i + 1 < agents; ++i) {
                spec.groups.push_back({i, i + 1});
                params.push_back(i % 2 == 0 ? even : odd);
            }
            const auto groups = spec.groups.size();

            Environment env(name, std::move(spec), std::vector<RewardModel>(groups, kind), std::move(params),
                            FactorTables(groups), static_cast<double>(groups), 1.0,
                            nlohmann::json{{"generator", name}, {"agents", agents}});
            if (env.optimum().value > 1.0 + 1e-12)
                throw SpecError(SpecError::Kind::InvalidValue, name + ": global mean exceeds 1");
            return env;
        }
    }

    Environment::Environment(std::string name, MamabSpec spec, std::vector<RewardModel> kinds,
                             FactorTables params, FactorTables stddevs, const double scale,
                             const double rewardRange, nlohmann::json metadata) :
            name_(std::move(name)), spec_(std::move(spec)), kinds_(std::move(kinds)),
            params_(std::move(params)), stddevs_(std::move(stddevs)), scale_(scale),
            rewardRange_(rewardRange), metadata_(std::move(metadata)),
            regret_((validate(spec_), checkParams(spec_, kinds_, params_, stddevs_), spec_), scaled(params_, scale))
    {
        if (!(scale_ > 0.0) || !std::isfinite(scale_))
            throw SpecError(SpecError::Kind::InvalidValue, "reward scale must be positive");
        if (!(rewardRange_ >= 0.0) || !std::isfinite(rewardRange_))
            throw SpecError(SpecError::Kind::InvalidValue, "reward range must be nonnegative");
    }

    std::vector<double> Environment::sampleRewards(const JointArm & arm, RandomEngine & rng) const {
        std::vector<double> rewards(spec_.groups.size());
        for (std::size_t e = 0; e < rewards.size(); ++e) {
            const auto a = static_cast<Eigen::Index>(project(arm, spec_, e));
            const double p = params_[e][a];
            double x = 0.0;
            switch (kinds_[e]) {
                case RewardModel::Bernoulli:
                    x = std::bernoulli_distribution(p)(rng) ? 1.0 : 0.0;
                    break;
                case RewardModel::Poisson:
                    // std::poisson_distribution requires a positive mean.
                    x = p > 0.0 ? static_cast<double>(std::poisson_distribution<long>(p)(rng)) : 0.0;
                    break;
                case RewardModel::Normal: {
                    const double sd = stddevs_[e][a];
                    x = sd > 0.0 ? std::normal_distribution<double>(p, sd)(rng) : p;
                    break;
                }
            }
            rewards[e] = x / scale_;
        }
        return rewards;
    }

    Environment bernoulliChain(const std::size_t agents) {
        return chain("bernoulli-chain", agents, RewardModel::Bernoulli, table({0.75, 1.0, 0.25, 0.9}));
    }

    Environment poissonChain(const std::size_t agents) {
        return chain("poisson-chain", agents, RewardModel::Poisson, table({0.1, 0.3, 0.2, 0.1}));
    }

    Environment gemMining(const std::size_t villages, const std::uint64_t seed) {
        RandomEngine rng(seed);
        auto env = gemMining(villages, rng);
        return env;
    }

    Environment gemMining(const std::size_t villages, RandomEngine & rng) {
        if (villages < 1)
            throw SpecError(SpecError::Kind::InvalidSize, "gem mining needs at least one village");

        std::vector<std::size_t> population(villages), reach(villages);
        for (std::size_t i = 0; i < villages; ++i) {
            population[i] = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
            reach[i] = i + 1 == villages ? 4 : std::uniform_int_distribution<std::size_t>(2, 4)(rng);
        }

        const std::size_t mines = villages - 1 + 4;
        std::vector<double> base(mines);
        for (auto & p : base) p = std::uniform_real_distribution<double>(0.0, 0.5)(rng);

        // Village i reaches mines i .. i + reach[i] - 1; its action k sends
        // its workers to mine i + k.
        std::vector<Agents> connected(mines);
        for (std::size_t i = 0; i < villages; ++i)
            for (std::size_t k = 0; k < reach[i]; ++k)
                connected[i + k].push_back(i);

        MamabSpec spec;
        spec.numAgents = villages;
        spec.actionCounts = reach;

        std::vector<std::size_t> mineIds;
        FactorTables params;
        for (std::size_t j = 0; j < mines; ++j) {
            if (connected[j].empty()) continue;
            mineIds.push_back(j);
            spec.groups.push_back(connected[j]);

            const auto e = spec.groups.size() - 1;
            Vector probs(static_cast<Eigen::Index>(localArmCount(spec, e)));
            for (Eigen::Index a = 0; a < probs.size(); ++a) {
                const auto actions = decode(spec, e, static_cast<std::size_t>(a));
                std::size_t workers = 0;
                for (std::size_t k = 0; k < actions.size(); ++k) {
                    const auto village = connected[j][k];
                    if (village + actions[k] == j) workers += population[village];
                }
                probs[a] = workers == 0 ? 0.0 : std::pow(1.03, static_cast<double>(workers) - 1.0) * base[j];
            }
            params.push_back(std::move(probs));
        }

        const auto groups = spec.groups.size();
        nlohmann::json metadata{
            {"generator", "gem-mining"},
            {"villages", villages},
            {"population", population},
            {"reach", reach},
            {"base_probability", base},
            {"mines", mineIds},
        };
        return Environment("gem-mining", std::move(spec), std::vector<RewardModel>(groups, RewardModel::Bernoulli),
                           std::move(params), FactorTables(groups), static_cast<double>(groups), 1.0,
                           std::move(metadata));
    }

    const char * toString(const RewardModel model) {
        switch (model) {
            case RewardModel::Bernoulli: return "bernoulli";
            case RewardModel::Poisson:   return "poisson";
            case RewardModel::Normal:    return "normal";
        }
        return "unknown";
    }

    RewardModel rewardModelFromString(const std::string & name) {
        if (name == "bernoulli") return RewardModel::Bernoulli;
        if (name == "poisson")   return RewardModel::Poisson;
        if (name == "normal")    return RewardModel::Normal;
        throw SpecError(SpecError::Kind::Config, "unknown distribution kind '" + name + "'");
    }

    nlohmann::json specToJson(const MamabSpec & spec) {
        return {
            {"agents", spec.numAgents},
            {"action_counts", spec.actionCounts},
            {"groups", spec.groups},
        };
    }

    MamabSpec specFromJson(const nlohmann::json & j) {
        MamabSpec spec;
        try {
            spec.numAgents = j.at("agents").get<std::size_t>();
            spec.actionCounts = j.at("action_counts").get<std::vector<std::size_t>>();
            spec.groups = j.at("groups").get<std::vector<Agents>>();
        } catch (const nlohmann::json::exception & ex) {
            throw SpecError(SpecError::Kind::Config, std::string("malformed problem file: ") + ex.what());
        }
        validate(spec);
        return spec;
    }

    nlohmann::json environmentToJson(const Environment & env) {
        auto j = specToJson(env.spec());
        j["name"] = env.name();
        j["scale"] = env.scale();
        j["reward_range"] = env.rewardRange();
        auto & dists = j["distributions"] = nlohmann::json::array();
        for (std::size_t e = 0; e < env.kinds().size(); ++e) {
            const auto & p = env.params()[e];
            nlohmann::json d{
                {"kind", toString(env.kinds()[e])},
                {"params", std::vector<double>(p.begin(), p.end())},
            };
            if (env.kinds()[e] == RewardModel::Normal) {
                const auto & s = env.stddevs()[e];
                d["stddev"] = std::vector<double>(s.begin(), s.end());
            }
            dists.push_back(std::move(d));
        }
        j["metadata"] = env.metadata();
        return j;
    }

    Environment environmentFromJson(const nlohmann::json & j) {
        auto spec = specFromJson(j);
        try {
            const auto & dists = j.at("distributions");
            if (!dists.is_array() || dists.size() != spec.groups.size())
                throw SpecError(SpecError::Kind::TableSizeMismatch, "expected one distribution per group");

            std::vector<RewardModel> kinds;
            FactorTables params, stddevs;
            for (const auto & d : dists) {
                kinds.push_back(rewardModelFromString(d.at("kind").get<std::string>()));
                const auto p = d.at("params").get<std::vector<double>>();
                params.push_back(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
                if (kinds.back() == RewardModel::Normal) {
                    const auto s = d.at("stddev").get<std::vector<double>>();
                    stddevs.push_back(Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size())));
                } else {
                    stddevs.emplace_back();
                }
            }
            const double scale = j.value("scale", static_cast<double>(spec.groups.size()));
            const double range = j.value("reward_range", 1.0);
            return Environment(j.value("name", std::string("problem")), std::move(spec), std::move(kinds),
                               std::move(params), std::move(stddevs), scale, range,
                               j.value("metadata", nlohmann::json::object()));
        } catch (const nlohmann::json::exception & ex) {
            throw SpecError(SpecError::Kind::Config, std::string("malformed problem file: ") + ex.what());
        }
    }
}
