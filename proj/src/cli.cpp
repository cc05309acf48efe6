#include <mats/cli.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include <mats/experiment.hpp>

namespace mats {
    namespace {
        struct BenchOptions {
            std::string name;
            std::optional<std::size_t> agents;
            std::size_t horizon = 10000;
            std::size_t runs = 20;
            std::uint64_t seed = 42;
            std::uint64_t instanceSeed = 1;
            std::vector<std::string> policies;
            std::optional<double> sigma, delta, epsilon, alpha;
            std::string out;
            bool fullResolution = false;
            bool normalize = false;
            bool traces = false;
        };

        nlohmann::json presetEnvironment(const std::string & name, const std::optional<std::size_t> agents,
                                         const std::uint64_t instanceSeed) {
            if (name == "bernoulli-chain" || name == "poisson-chain")
                return {{"name", name}, {"agents", agents.value_or(10)}};
            if (name == "gem-mining")
                return {{"name", name}, {"villages", agents.value_or(15)}, {"seed", instanceSeed}};
            throw SpecError(SpecError::Kind::Config,
                            "unknown preset '" + name + "' (expected bernoulli-chain, poisson-chain or gem-mining)");
        }

        ExperimentConfig benchConfig(const BenchOptions & o) {
            ExperimentConfig config;
            config.environment = presetEnvironment(o.name, o.agents, o.instanceSeed);
            config.horizon = o.horizon;
            config.runs = o.runs;
            config.masterSeed = o.seed;
            config.output = o.out.empty() ? "results/" + o.name : o.out;
            config.fullResolution = o.fullResolution;
            config.normalize = o.normalize;
            config.writeTraces = o.traces;

            const std::vector<std::string> defaults{"mats", "factored_ucb", "scql", "random"};
            for (const auto & name : o.policies.empty() ? defaults : o.policies) {
                PolicyConfig pc;
                pc.kind = policyKindFromString(name);
                pc.sigma = o.sigma;
                pc.delta = o.delta;
                if (o.epsilon) pc.epsilon = *o.epsilon;
                if (o.alpha) pc.learningRate = *o.alpha;
                pc.check();
                config.policies.push_back(pc);
            }
            if (config.horizon == 0 || config.runs == 0)
                throw SpecError(SpecError::Kind::Config, "horizon and runs must be positive");
            return config;
        }

        nlohmann::json readJson(const std::string & path) {
            std::ifstream in(path);
            if (!in) throw SpecError(SpecError::Kind::Config, "cannot open " + path);
            try {
                return nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error & ex) {
                throw SpecError(SpecError::Kind::Config, path + ": " + ex.what());
            }
        }

        void summarize(const Environment & env, const ExperimentResult & result, const std::string & dir,
                       std::ostream & out) {
            out << env.name() << ": " << env.spec().numAgents << " agents, " << env.spec().groups.size()
                << " groups, " << totalLocalArms(env.spec()) << " local arms, optimal mean "
                << formatDouble(env.optimum().value) << '\n';
            for (const auto & agg : result.aggregates)
                out << "  " << agg.policy << ": R(T) = "
                    << (agg.mean.size() ? formatDouble(agg.mean[agg.mean.size() - 1]) : std::string("0")) << '\n';
            out << "wrote " << (std::filesystem::path(dir) / "aggregate.csv").string() << '\n';
        }
    }

    int cliMain(const int argc, const char * const * argv, std::ostream & out, std::ostream & err) {
        CLI::App app{"Multi-agent Thompson sampling experiments"};
        app.require_subcommand(1);

        std::string configPath, runOut;
        auto * run = app.add_subcommand("run", "Run an experiment config file");
        run->add_option("config", configPath, "Experiment config (JSON)")->required();
        run->add_option("--out", runOut, "Override the output directory");

        BenchOptions bench;
        auto * benchCmd = app.add_subcommand("bench", "Run a built-in benchmark preset");
        benchCmd->add_option("name", bench.name, "bernoulli-chain, poisson-chain or gem-mining")->required();
        benchCmd->add_option("--agents", bench.agents, "Agents (villages for gem-mining)");
        benchCmd->add_option("--horizon", bench.horizon, "Time steps per run");
        benchCmd->add_option("--runs", bench.runs, "Independent runs per policy");
        benchCmd->add_option("--seed", bench.seed, "Master seed");
        benchCmd->add_option("--instance-seed", bench.instanceSeed, "Generator seed (gem-mining)");
        benchCmd->add_option("--policy", bench.policies, "Policy (repeatable): mats, factored_ucb, scql, random");
        benchCmd->add_option("--sigma", bench.sigma, "Subgaussian scale for factored UCB");
        benchCmd->add_option("--delta", bench.delta, "Fixed confidence level for factored UCB");
        benchCmd->add_option("--epsilon", bench.epsilon, "Initial SCQL exploration rate");
        benchCmd->add_option("--alpha", bench.alpha, "SCQL learning rate");
        benchCmd->add_option("--out", bench.out, "Output directory");
        benchCmd->add_flag("--full-resolution", bench.fullResolution, "Write every time step");
        benchCmd->add_flag("--normalize", bench.normalize, "Divide regret by the optimal mean");
        benchCmd->add_flag("--traces", bench.traces, "Also write per-run traces.csv");

        std::string problemPath;
        auto * validateCmd = app.add_subcommand("validate", "Check a problem file");
        validateCmd->add_option("problem", problemPath, "Problem file (JSON)")->required();

        std::string preset, boundProblem, boundOut;
        std::optional<std::size_t> boundAgents;
        std::size_t boundHorizon = 10000;
        std::optional<double> boundSigma;
        std::uint64_t boundSeed = 1;
        auto * boundCmd = app.add_subcommand("bound", "Emit the regret bound curve");
        auto * presetOpt = boundCmd->add_option("--preset", preset, "Benchmark preset");
        auto * problemOpt = boundCmd->add_option("--problem", boundProblem, "Problem file instead of a preset");
        presetOpt->excludes(problemOpt);
        boundCmd->add_option("--agents", boundAgents, "Agents (villages for gem-mining)");
        boundCmd->add_option("--horizon", boundHorizon, "Number of time steps");
        boundCmd->add_option("--sigma", boundSigma, "Subgaussian scale (default: range / (2 * scale))");
        boundCmd->add_option("--instance-seed", boundSeed, "Generator seed (gem-mining)");
        boundCmd->add_option("--out", boundOut, "Output file (default: standard output)");

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp &) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::CallForAllHelp &) {
            out << app.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::ParseError & ex) {
            err << "error: " << ex.what() << '\n' << app.help();
            return kExitConfigError;
        }

        try {
            if (*run) {
                auto config = configFromJson(readJson(configPath));
                if (!runOut.empty()) config.output = runOut;
                const auto baseDir = std::filesystem::path(configPath).parent_path().string();
                const auto env = environmentFromConfig(config.environment, baseDir.empty() ? "." : baseDir);
                const auto result = runAndEmit(env, config);
                summarize(env, result, config.output, out);
            } else if (*benchCmd) {
                const auto config = benchConfig(bench);
                const auto env = environmentFromConfig(config.environment);
                const auto result = runAndEmit(env, config);
                summarize(env, result, config.output, out);
            } else if (*validateCmd) {
                const auto j = readJson(problemPath);
                const auto spec = specFromJson(j);
                if (j.contains("distributions")) environmentFromJson(j);
                out << "ok: " << spec.numAgents << " agents, " << spec.groups.size() << " groups, "
                    << totalLocalArms(spec) << " local arms\n";
            } else if (*boundCmd) {
                if (preset.empty() && boundProblem.empty())
                    throw SpecError(SpecError::Kind::Config, "bound needs --preset or --problem");
                const auto env = boundProblem.empty()
                    ? environmentFromConfig(presetEnvironment(preset, boundAgents, boundSeed))
                    : environmentFromJson(readJson(boundProblem));
                const auto curve = boundCurve(env.spec(), boundSigma.value_or(env.defaultSigma()), boundHorizon);

                auto write = [&](std::ostream & os) {
                    os << "bound\n";
                    for (const double v : curve) os << formatDouble(v) << '\n';
                };
                if (boundOut.empty()) {
                    write(out);
                } else {
                    std::ofstream file(boundOut, std::ios::binary);
                    if (!file) throw std::runtime_error("cannot open " + boundOut + " for writing");
                    write(file);
                    if (!file.flush()) throw std::runtime_error("failed writing " + boundOut);
                }
            }
        } catch (const SpecError & ex) {
            err << "error: " << ex.what() << '\n';
            return kExitConfigError;
        } catch (const std::exception & ex) {
            err << "runtime error: " << ex.what() << '\n';
            return kExitRuntimeError;
        }
        return kExitOk;
    }
}
