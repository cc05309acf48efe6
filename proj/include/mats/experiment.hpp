#ifndef MATS_EXPERIMENT_HEADER_FILE
#define MATS_EXPERIMENT_HEADER_FILE

#include <iosfwd>
#include <string>

#include <json.hpp>

#include <mats/environments.hpp>
#include <mats/policies.hpp>

namespace mats {
    /// splitmix64 finalizer.
    std::uint64_t splitmix64(std::uint64_t x);

    /**
     * @brief Seed of one (run, policy) pair.
     *
     *     h = splitmix64(master)
     *     h = splitmix64(h ^ (run + 0x9E3779B97F4A7C15))
     *     h = splitmix64(h ^ (policy + 0xBF58476D1CE4E5B9))
     */
    std::uint64_t runSeed(std::uint64_t master, std::uint64_t run, std::uint64_t policy);

    struct RegretTrace {
        std::string policy;
        std::size_t run = 0;
        /// Entry t - 1 holds the value after step t.
        std::vector<double> instantaneous;
        std::vector<double> cumulative;
    };

    /**
     * @brief Plays T steps of select, sample, observe.
     *
     * Regret is measured on the true means, never on realized rewards. The
     * policy and the environment draw from separate engines, both derived
     * from seed.
     */
    RegretTrace runOne(const Environment & env, Policy & policy, std::size_t horizon, std::uint64_t seed,
                       std::size_t run = 0);

    struct Aggregate {
        std::string policy;
        Vector mean;
        Vector stddev;
    };

    /**
     * @brief Pointwise mean and sample standard deviation (n - 1 divisor)
     * of the cumulative regret; a single trace has zero deviation.
     * Values are divided by normalizer first.
     */
    Aggregate aggregate(const std::vector<RegretTrace> & traces, double normalizer = 1.0);

    /**
     * @brief sqrt(64 sigma^2 A rho t log(A t)) + 2 / A for t = 1 .. T,
     * with A the total number of local arms and rho the number of groups.
     * Steps with A t < 2 take the value at the first t with A t >= 2.
     */
    Vector boundCurve(const MamabSpec & spec, double sigma, std::size_t horizon);

    /**
     * @brief Steps written to CSV: every step up to T when full is set or
     * T <= 10^4, otherwise every step up to 1000 followed by 100
     * logarithmically spaced checkpoints per decade, always ending at T.
     */
    std::vector<std::size_t> checkpoints(std::size_t horizon, bool full);

    struct ExperimentConfig {
        /// Environment description; see environmentFromConfig.
        nlohmann::json environment;
        std::vector<PolicyConfig> policies;
        std::size_t horizon = 10000;
        std::size_t runs = 20;
        std::uint64_t masterSeed = 0;
        std::string output = "results";
        bool fullResolution = false;
        bool normalize = false;
        bool writeTraces = false;
    };

    /**
     * @brief Builds the environment named in a config.
     *
     *     { "name": "bernoulli-chain" | "poisson-chain", "agents": n }
     *     { "name": "gem-mining", "villages": n, "seed": s }
     *     { "name": "problem", "file": path }      (or "problem": {inline})
     *
     * Relative problem paths resolve against baseDir.
     */
    Environment environmentFromConfig(const nlohmann::json & j, const std::string & baseDir = ".");

    ExperimentConfig configFromJson(const nlohmann::json & j);
    nlohmann::json configToJson(const ExperimentConfig & config);

    struct ExperimentResult {
        std::vector<std::string> policies;
        /// traces[p][r] is run r of policy p.
        std::vector<std::vector<RegretTrace>> traces;
        std::vector<Aggregate> aggregates;
        Vector bound;
        double optimalMean = 0.0;
        bool normalized = false;
    };

    /// Worker count: FB_THREADS if set and positive, else the hardware concurrency.
    std::size_t defaultThreads();

    /**
     * @brief Runs every (run, policy) pair, in parallel across pairs.
     * Results do not depend on the number of threads.
     */
    ExperimentResult runExperiment(const Environment & env, const ExperimentConfig & config,
                                   std::size_t threads = defaultThreads());

    /// printf("%.17g"): 17 significant digits, enough to round-trip any double.
    std::string formatDouble(double x);

    /// policy,t,mean_cum_regret,std_cum_regret,bound
    void writeAggregateCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, std::ostream & os);
    void emitCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, const std::string & path);

    /// policy,run_id,t,instantaneous_regret,cumulative_regret,normalized_cumulative_regret
    void writeTraceCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, std::ostream & os);
    void emitTraceCsv(const ExperimentResult & result, const std::vector<std::size_t> & steps, const std::string & path);

    /// Runs and writes aggregate.csv (and traces.csv if requested) under config.output.
    ExperimentResult runAndEmit(const Environment & env, const ExperimentConfig & config,
                                std::size_t threads = defaultThreads());
}

#endif
