#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <mats/environments.hpp>

#include "test_support.hpp"

using namespace mats;
using mats::testing::table2;
using mats::testing::randomArm;

namespace {
    JointArm alternating(std::size_t n) {
        JointArm arm(n);
        for (std::size_t i = 0; i < n; ++i) arm[i] = i % 2;
        return arm;
    }
}

TEST_CASE("bernoulli chain layout") {
    const auto two = bernoulliChain(2);
    CHECK(two.spec().groups.size() == 1);
    CHECK(two.scale() == 1.0);
    CHECK(two.params()[0] == table2(0.75, 1.0, 0.25, 0.9));

    const auto three = bernoulliChain(3);
    CHECK(three.params()[1] == table2(0.75, 0.25, 1.0, 0.9));
    CHECK(three.optimum().arm == JointArm{0, 1, 0});
    CHECK(three.optimum().value == doctest::Approx(1.0));

    const auto ten = bernoulliChain(10);
    CHECK(ten.scale() == 9.0);
    CHECK(totalLocalArms(ten.spec()) == 36);
    const auto brute = bruteForceArgmax(ten.trueMeans(), ten.spec());
    CHECK(brute.value == doctest::Approx(1.0));
    CHECK(ten.optimum().value == doctest::Approx(1.0));

    CHECK_THROWS_AS(bernoulliChain(1), SpecError);
    CHECK_THROWS_AS(poissonChain(0), SpecError);
}

TEST_CASE("both chains are optimized by the alternating arm") {
    for (std::size_t n = 2; n <= 12; ++n) {
        for (const auto & env : {bernoulliChain(n), poissonChain(n)}) {
            const auto brute = bruteForceArgmax(env.trueMeans(), env.spec());
            CHECK(brute.arm == alternating(n));
            CHECK(env.optimum().arm == alternating(n));
            CHECK(brute.value <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("poisson chain") {
    const auto two = poissonChain(2);
    CHECK(two.optimum().arm == JointArm{0, 1});
    CHECK(two.params()[0][1] == doctest::Approx(0.3));

    const auto three = poissonChain(3);
    double best = -1.0;
    JointArm bestArm;
    testing::forEachArm(three.spec(), [&](const JointArm & arm) {
        const double v = testing::evaluate(three.trueMeans(), three.spec(), arm);
        if (v > best) { best = v; bestArm = arm; }
    });
    CHECK(bestArm == JointArm{0, 1, 0});
    CHECK(best == doctest::Approx(0.3));
    CHECK(three.optimum().value == doctest::Approx(0.3));

    RandomEngine rng(3);
    const auto ten = poissonChain(10);
    for (int i = 0; i < 2000; ++i) {
        for (const double r : ten.sampleRewards(randomArm(ten.spec(), rng), rng)) {
            const double k = r * 9.0;
            CHECK(k >= 0.0);
            CHECK(std::abs(k - std::round(k)) < 1e-9);
        }
    }
}

TEST_CASE("bernoulli rewards are unbiased") {
    const auto env = bernoulliChain(41);
    constexpr int draws = 100'000;
    RandomEngine rng(17);
    const auto arm = randomArm(env.spec(), rng);

    std::vector<double> sums(env.spec().groups.size(), 0.0);
    for (int i = 0; i < draws; ++i) {
        const auto r = env.sampleRewards(arm, rng);
        for (std::size_t e = 0; e < r.size(); ++e) sums[e] += r[e];
    }

    std::size_t within = 0;
    for (std::size_t e = 0; e < sums.size(); ++e) {
        const double mean = env.trueMeans()[e][static_cast<Eigen::Index>(project(arm, env.spec(), e))];
        const double p = mean * env.scale();
        const double se = std::sqrt(p * (1.0 - p) / draws) / env.scale();
        if (std::abs(sums[e] / draws - mean) <= 3.0 * se + 1e-12) ++within;
    }
    CHECK(static_cast<double>(within) >= 0.95 * static_cast<double>(sums.size()));
}

TEST_CASE("poisson reward variance") {
    const auto env = poissonChain(5);
    const auto arm = alternating(5);
    constexpr int draws = 200'000;
    RandomEngine rng(23);

    std::vector<double> sum(4, 0.0), sq(4, 0.0);
    for (int i = 0; i < draws; ++i) {
        const auto r = env.sampleRewards(arm, rng);
        for (std::size_t e = 0; e < 4; ++e) {
            sum[e] += r[e];
            sq[e] += r[e] * r[e];
        }
    }
    for (std::size_t e = 0; e < 4; ++e) {
        const double mean = sum[e] / draws;
        const double var = sq[e] / draws - mean * mean;
        const double expected = 0.3 / (4.0 * 4.0);
        CHECK(std::abs(var - expected) / expected < 0.05);
    }
}

TEST_CASE("deterministic problem rewards are exact") {
    const nlohmann::json problem = {
        {"agents", 2},
        {"action_counts", {2, 2}},
        {"groups", {{0}, {0, 1}}},
        {"distributions", {
            {{"kind", "bernoulli"}, {"params", {0.0, 1.0}}},
            {{"kind", "bernoulli"}, {"params", {1.0, 0.0, 1.0, 1.0}}},
        }},
    };
    const auto env = environmentFromJson(problem);
    CHECK(env.scale() == 2.0);
    RandomEngine rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK(env.sampleRewards({1, 0}, rng) == std::vector<double>{0.5, 0.5});
        CHECK(env.sampleRewards({0, 1}, rng) == std::vector<double>{0.0, 0.0});
    }
    CHECK(env.optimum().arm == JointArm{1, 0});
}

TEST_CASE("problem file validation") {
    nlohmann::json bad = {
        {"agents", 2}, {"action_counts", {2, 2}}, {"groups", {{0}}},
        {"distributions", {{{"kind", "bernoulli"}, {"params", {0.5, 0.5}}}}},
    };
    try {
        environmentFromJson(bad);
        FAIL("expected OrphanAgent");
    } catch (const SpecError & ex) {
        CHECK(ex.kind() == SpecError::Kind::OrphanAgent);
    }

    bad["groups"] = {{0, 1}};
    CHECK_THROWS_AS(environmentFromJson(bad), SpecError);  // 2 params for 4 local arms

    bad["distributions"][0]["params"] = {0.5, 0.5, 1.5, 0.0};
    CHECK_THROWS_AS(environmentFromJson(bad), SpecError);  // probability above 1

    bad["distributions"][0] = {{"kind", "cauchy"}, {"params", {0.0, 0.0, 0.0, 0.0}}};
    CHECK_THROWS_AS(environmentFromJson(bad), SpecError);

    bad["distributions"][0] = {{"kind", "normal"}, {"params", {0.0, 0.0, 0.0, 0.0}}};
    CHECK_THROWS_AS(environmentFromJson(bad), SpecError);  // missing stddev

    bad["distributions"][0]["stddev"] = {1.0, 1.0, 1.0, 1.0};
    CHECK_NOTHROW(environmentFromJson(bad));

    CHECK_THROWS_AS(specFromJson(nlohmann::json{{"agents", 2}}), SpecError);
}

TEST_CASE("environment json round trip") {
    const auto env = gemMining(6, 3);
    const auto j = environmentToJson(env);
    const auto back = environmentFromJson(j);
    CHECK(back.spec() == env.spec());
    CHECK(back.scale() == env.scale());
    for (std::size_t e = 0; e < env.params().size(); ++e)
        CHECK(back.params()[e] == env.params()[e]);
    CHECK(environmentToJson(back).dump() == j.dump());
}

TEST_CASE("gem mining structure") {
    const auto one = gemMining(1, 5);
    CHECK(one.spec().numAgents == 1);
    CHECK(one.spec().actionCounts == std::vector<std::size_t>{4});
    CHECK(one.spec().groups.size() == 4);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto env = gemMining(15, seed);
        const auto & spec = env.spec();
        const auto & meta = env.metadata();
        const auto population = meta.at("population").get<std::vector<std::size_t>>();
        const auto reach = meta.at("reach").get<std::vector<std::size_t>>();
        const auto base = meta.at("base_probability").get<std::vector<double>>();
        const auto mines = meta.at("mines").get<std::vector<std::size_t>>();

        CHECK(reach.back() == 4);
        CHECK(base.size() == 15 - 1 + 4);
        for (std::size_t i = 0; i < 15; ++i) {
            CHECK(spec.actionCounts[i] >= 2);
            CHECK(spec.actionCounts[i] <= 4);
            CHECK(population[i] >= 1);
            CHECK(population[i] <= 5);
        }

        for (std::size_t e = 0; e < spec.groups.size(); ++e) {
            const auto mine = mines[e];
            CHECK(base[mine] >= 0.0);
            CHECK(base[mine] < 0.5);
            // Exactly the villages whose reach covers this mine.
            Agents expected;
            for (std::size_t i = 0; i < 15; ++i)
                if (i <= mine && mine < i + reach[i]) expected.push_back(i);
            CHECK(spec.groups[e] == expected);

            for (std::size_t a = 0; a < localArmCount(spec, e); ++a) {
                const auto actions = decode(spec, e, a);
                std::size_t workers = 0;
                for (std::size_t k = 0; k < actions.size(); ++k)
                    if (spec.groups[e][k] + actions[k] == mine) workers += population[spec.groups[e][k]];
                const double p = env.params()[e][static_cast<Eigen::Index>(a)];
                if (workers == 0) CHECK(p == 0.0);
                else if (workers == 1) CHECK(p == base[mine]);
                else CHECK(p == doctest::Approx(std::pow(1.03, workers - 1.0) * base[mine]));
                CHECK(p <= 1.0);
            }
        }
    }
}

TEST_CASE("gem mining mines without workers never pay") {
    const auto env = gemMining(4, 9);
    const auto & spec = env.spec();
    RandomEngine rng(4);
    for (int i = 0; i < 500; ++i) {
        const auto arm = randomArm(spec, rng);
        const auto rewards = env.sampleRewards(arm, rng);
        for (std::size_t e = 0; e < rewards.size(); ++e)
            if (env.params()[e][static_cast<Eigen::Index>(project(arm, spec, e))] == 0.0)
                CHECK(rewards[e] == 0.0);
    }
}

TEST_CASE("gem mining is reproducible from its seed") {
    const auto a = environmentToJson(gemMining(15, 1234)).dump();
    const auto b = environmentToJson(gemMining(15, 1234)).dump();
    const auto c = environmentToJson(gemMining(15, 1235)).dump();
    CHECK(a == b);
    CHECK(a != c);
}
