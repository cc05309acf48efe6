#include <mats/experiment.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

namespace mats {
    std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::uint64_t runSeed(const std::uint64_t master, const std::uint64_t run, const std::uint64_t policy) {
        std::uint64_t h = splitmix64(master);
        h = splitmix64(h ^ (run + 0x9E3779B97F4A7C15ull));
        h = splitmix64(h ^ (policy + 0xBF58476D1CE4E5B9ull));
        return h;
    }

    RegretTrace runOne(const Environment & env, Policy & policy, const std::size_t horizon,
                       const std::uint64_t seed, const std::size_t run) {
        RandomEngine policyRng(splitmix64(seed));
        RandomEngine envRng(splitmix64(~seed));

        RegretTrace trace{policy.name(), run, {}, {}};
        trace.instantaneous.reserve(horizon);
        trace.cumulative.reserve(horizon);

        double total = 0.0;
        for (std::size_t t = 1; t <= horizon; ++t) {
            const auto arm = policy.select(t, policyRng);
            const auto rewards = env.sampleRewards(arm, envRng);
            policy.observe(arm, rewards);

            const double delta = env.regret().delta(arm);
            total += delta;
            trace.instantaneous.push_back(delta);
            trace.cumulative.push_back(total);
        }
        return trace;
    }

    Aggregate aggregate(const std::vector<RegretTrace> & traces, const double normalizer) {
        if (traces.empty())
            throw SpecError(SpecError::Kind::InvalidSize, "cannot aggregate zero traces");
        const auto horizon = traces.front().cumulative.size();
        for (const auto & trace : traces)
            if (trace.cumulative.size() != horizon)
                throw SpecError(SpecError::Kind::InvalidSize, "traces have different lengths");

        const auto T = static_cast<Eigen::Index>(horizon);
        const double n = static_cast<double>(traces.size());

        Aggregate retval{traces.front().policy, Vector::Zero(T), Vector::Zero(T)};
        for (const auto & trace : traces)
            retval.mean += Eigen::Map<const Vector>(trace.cumulative.data(), T) / normalizer;
        retval.mean /= n;

        if (traces.size() > 1) {
            for (const auto & trace : traces)
                retval.stddev += (Eigen::Map<const Vector>(trace.cumulative.data(), T) / normalizer - retval.mean)
                                     .array().square().matrix();
            retval.stddev = (retval.stddev / (n - 1.0)).array().sqrt().matrix();
        }
        return retval;
    }

    Vector boundCurve(const MamabSpec & spec, const double sigma, const std::size_t horizon) {
        validate(spec);
        const double arms = static_cast<double>(totalLocalArms(spec));
        const double groups = static_cast<double>(spec.groups.size());
        const double firstValid = std::ceil(2.0 / arms);

        Vector curve(static_cast<Eigen::Index>(horizon));
        for (std::size_t t = 1; t <= horizon; ++t) {
            const double tt = std::max(static_cast<double>(t), firstValid);
            curve[static_cast<Eigen::Index>(t - 1)] =
                std::sqrt(64.0 * sigma * sigma * arms * groups * tt * std::log(arms * tt)) + 2.0 / arms;
        }
        return curve;
    }

    std::vector<std::size_t> checkpoints(const std::size_t horizon, const bool full) {
        constexpr std::size_t denseLimit = 1000;
        constexpr std::size_t thinningThreshold = 10000;
        constexpr double perDecade = 100.0;

        std::vector<std::size_t> steps;
        if (full || horizon <= thinningThreshold) {
            for (std::size_t t = 1; t <= horizon; ++t) steps.push_back(t);
            return steps;
        }
        for (std::size_t t = 1; t <= denseLimit; ++t) steps.push_back(t);
        for (int k = 1;; ++k) {
            const auto t = static_cast<std::size_t>(std::llround(denseLimit * std::pow(10.0, k / perDecade)));
            if (t >= horizon) break;
            if (t > steps.back()) steps.push_back(t);
        }
        steps.push_back(horizon);
        return steps;
    }

    Environment environmentFromConfig(const nlohmann::json & j, const std::string & baseDir) {
        try {
            const auto name = j.at("name").get<std::string>();
            if (name == "bernoulli-chain") return bernoulliChain(j.value("agents", std::size_t{10}));
            if (name == "poisson-chain")   return poissonChain(j.value("agents", std::size_t{10}));
            if (name == "gem-mining")
                return gemMining(j.value("villages", std::size_t{15}), j.value("seed", std::uint64_t{1}));
            if (name == "problem") {
                if (j.contains("problem")) return environmentFromJson(j.at("problem"));
                std::filesystem::path path = j.at("file").get<std::string>();
                if (path.is_relative()) path = std::filesystem::path(baseDir) / path;
                std::ifstream in(path);
                if (!in)
                    throw SpecError(SpecError::Kind::Config, "cannot open problem file " + path.string());
                return environmentFromJson(nlohmann::json::parse(in));
            }
            throw SpecError(SpecError::Kind::Config, "unknown environment '" + name + "'");
        } catch (const nlohmann::json::exception & ex) {
            throw SpecError(SpecError::Kind::Config, std::string("malformed environment: ") + ex.what());
        }
    }

    ExperimentConfig configFromJson(const nlohmann::json & j) {
        ExperimentConfig config;
        try {
            config.environment = j.at("environment");
            for (const auto & p : j.at("policies")) {
                PolicyConfig pc;
                pc.kind = policyKindFromString(p.at("kind").get<std::string>());
                if (p.contains("sigma")) pc.sigma = p.at("sigma").get<double>();
                if (p.contains("delta")) pc.delta = p.at("delta").get<double>();
                pc.epsilon = p.value("epsilon", pc.epsilon);
                pc.epsilonDecay = p.value("epsilon_decay", pc.epsilonDecay);
                pc.learningRate = p.value("alpha", pc.learningRate);
                pc.check();
                config.policies.push_back(pc);
            }
            config.horizon = j.value("horizon", config.horizon);
            config.runs = j.value("runs", config.runs);
            config.masterSeed = j.value("master_seed", config.masterSeed);
            config.output = j.value("output", config.output);
            config.fullResolution = j.value("full_resolution", config.fullResolution);
            config.normalize = j.value("normalize", config.normalize);
            config.writeTraces = j.value("write_traces", config.writeTraces);
        } catch (const nlohmann::json::exception & ex) {
            throw SpecError(SpecError::Kind::Config, std::string("malformed config: ") + ex.what());
        }
        if (config.horizon == 0 || config.runs == 0)
            throw SpecError(SpecError::Kind::Config, "horizon and runs must be positive");
        return config;
    }

    nlohmann::json configToJson(const ExperimentConfig & config) {
        auto policies = nlohmann::json::array();
        for (const auto & p : config.policies) {
            nlohmann::json pj{{"kind", toString(p.kind)}};
            if (p.sigma) pj["sigma"] = *p.sigma;
            if (p.delta) pj["delta"] = *p.delta;
            if (p.kind == PolicyKind::Scql) {
                pj["epsilon"] = p.epsilon;
                pj["epsilon_decay"] = p.epsilonDecay;
                pj["alpha"] = p.learningRate;
            }
            policies.push_back(std::move(pj));
        }
        return {
            {"environment", config.environment},
            {"policies", policies},
            {"horizon", config.horizon},
            {"runs", config.runs},
            {"master_seed", config.masterSeed},
            {"output", config.output},
            {"full_resolution", config.fullResolution},
            {"normalize", config.normalize},
            {"write_traces", config.writeTraces},
        };
    }

    std::size_t defaultThreads() {
        if (const char * env = std::getenv("FB_THREADS")) {
            char * end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0) return static_cast<std::size_t>(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    ExperimentResult runExperiment(const Environment & env, const ExperimentConfig & config, const std::size_t threads) {
        for (const auto & p : config.policies) p.check();

        ExperimentResult result;
        result.optimalMean = env.optimum().value;
        result.normalized = config.normalize;
        result.traces.assign(config.policies.size(), std::vector<RegretTrace>(config.runs));

        const std::size_t tasks = config.policies.size() * config.runs;
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};

        auto worker = [&] {
            for (std::size_t task = next++; task < tasks && !failed; task = next++) {
                const auto p = task / config.runs;
                const auto r = task % config.runs;
                try {
                    auto policy = makePolicy(config.policies[p], env);
                    result.traces[p][r] = runOne(env, *policy, config.horizon, runSeed(config.masterSeed, r, p), r);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        };

        const auto workers = std::max<std::size_t>(1, std::min(threads, tasks));
        if (workers == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
            for (auto & th : pool) th.join();
        }
        if (failure) std::rethrow_exception(failure);

        const double normalizer = config.normalize ? result.optimalMean : 1.0;
        if (config.normalize && !(normalizer > 0.0))
            throw SpecError(SpecError::Kind::Config, "cannot normalize: optimal mean is not positive");

        for (std::size_t p = 0; p < config.policies.size(); ++p) {
            result.policies.push_back(toString(config.policies[p].kind));
            if (config.horizon > 0)
                result.aggregates.push_back(aggregate(result.traces[p], normalizer));
            else
                result.aggregates.push_back({result.policies.back(), Vector(), Vector()});
        }
        result.bound = boundCurve(env.spec(), env.defaultSigma(), config.horizon) / normalizer;
        return result;
    }

    std::string formatDouble(const double x) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }

    void writeAggregateCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, std::ostream & os) {
        os << "policy,t,mean_cum_regret,std_cum_regret,bound\n";
        for (const auto & agg : result.aggregates) {
            for (const auto t : steps) {
                const auto i = static_cast<Eigen::Index>(t - 1);
                os << agg.policy << ',' << t << ',' << formatDouble(agg.mean[i]) << ','
                   << formatDouble(agg.stddev[i]) << ',' << formatDouble(result.bound[i]) << '\n';
            }
        }
    }

    void writeTraceCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, std::ostream & os) {
        os << "policy,run_id,t,instantaneous_regret,cumulative_regret,normalized_cumulative_regret\n";
        const double optimal = result.optimalMean;
        for (std::size_t p = 0; p < result.traces.size(); ++p) {
            for (const auto & trace : result.traces[p]) {
                for (const auto t : steps) {
                    const double cum = trace.cumulative[t - 1];
                    os << trace.policy << ',' << trace.run << ',' << t << ','
                       << formatDouble(trace.instantaneous[t - 1]) << ',' << formatDouble(cum) << ','
                       << formatDouble(optimal > 0.0 ? cum / optimal : 0.0) << '\n';
                }
            }
        }
    }

    namespace {
        template <typename Writer>
        void writeFile(const std::string & path, Writer && writer) {
            const auto parent = std::filesystem::path(path).parent_path();
            std::error_code ec;
            if (!parent.empty()) std::filesystem::create_directories(parent, ec);
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + path + " for writing");
            writer(out);
            out.flush();
            if (!out) throw std::runtime_error("failed writing " + path);
        }
    }

    void emitCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, const std::string & path) {
        writeFile(path, [&](std::ostream & os) { writeAggregateCsv(result, steps, os); });
    }

    void emitTraceCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, const std::string & path) {
        writeFile(path, [&](std::ostream & os) { writeTraceCsv(result, steps, os); });
    }

    ExperimentResult runAndEmit(const Environment & env, const ExperimentConfig & config, const std::size_t threads) {
        auto result = runExperiment(env, config, threads);
        const auto steps = checkpoints(config.horizon, config.fullResolution);
        const auto dir = std::filesystem::path(config.output);
        emitCsv(result, steps, (dir / "aggregate.csv").string());
        if (config.writeTraces)
            emitTraceCsv(result, steps, (dir / "traces.csv").string());
        return result;
    }
}
