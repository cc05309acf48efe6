#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include <mats/regret.hpp>

#include "test_support.hpp"

using namespace mats;
using mats::testing::table2;

namespace {
    SpecError::Kind validationError(const MamabSpec & spec) {
        try {
            validate(spec);
        } catch (const SpecError & ex) {
            return ex.kind();
        }
        FAIL("spec was accepted");
        return SpecError::Kind::Config;
    }

    MamabSpec chainSpec(std::size_t agents) {
        MamabSpec spec{agents, std::vector<std::size_t>(agents, 2), {}};
        for (std::size_t i = 0; i + 1 < agents; ++i) spec.groups.push_back({i, i + 1});
        return spec;
    }
}

TEST_CASE("validate accepts and rejects specs") {
    CHECK_NOTHROW(validate(MamabSpec{2, {2, 2}, {{0, 1}}}));

    CHECK(validationError(MamabSpec{2, {2, 2}, {{0}}}) == SpecError::Kind::OrphanAgent);
    CHECK(validationError(MamabSpec{1, {0}, {{0}}}) == SpecError::Kind::ActionIndexOutOfRange);
    CHECK(validationError(MamabSpec{2, {2, 2}, {{0, 1}, {}}}) == SpecError::Kind::EmptyGroup);
    CHECK(validationError(MamabSpec{2, {2, 2}, {{1, 0}}}) == SpecError::Kind::NonCanonicalGroupOrder);
    CHECK(validationError(MamabSpec{2, {2, 2}, {{0, 0, 1}}}) == SpecError::Kind::NonCanonicalGroupOrder);
    CHECK(validationError(MamabSpec{2, {2, 2}, {{0, 2}}}) == SpecError::Kind::ActionIndexOutOfRange);
    CHECK(validationError(MamabSpec{1, {2}, {}}) == SpecError::Kind::NoGroups);

    // Duplicate groups are allowed.
    CHECK_NOTHROW(validate(MamabSpec{2, {2, 2}, {{0, 1}, {0, 1}}}));
}

TEST_CASE("orphan error names the agent") {
    try {
        validate(MamabSpec{3, {2, 2, 2}, {{0, 2}}});
        FAIL("expected an error");
    } catch (const SpecError & ex) {
        CHECK(std::string(ex.what()).find("agent 1") != std::string::npos);
    }
}

TEST_CASE("project uses first-agent-major mixed radix") {
    CHECK(project({0, 1}, MamabSpec{2, {2, 2}, {{0, 1}}}, 0) == 1);
    CHECK(project({1, 0, 1}, MamabSpec{3, {2, 2, 2}, {{0}, {1, 2}}}, 1) == 1);

    // Enumerate the six local arms of a 2x3 group with the first agent
    // outermost and find where (1, 1) lands.
    const MamabSpec spec{2, {2, 3}, {{0, 1}}};
    std::size_t position = 0, found = 99;
    for (std::size_t a0 = 0; a0 < 2; ++a0)
        for (std::size_t a1 = 0; a1 < 3; ++a1, ++position)
            if (a0 == 1 && a1 == 1) found = position;
    REQUIRE(found == 4);
    CHECK(project({1, 1}, spec, 0) == found);
}

TEST_CASE("project is a bijection onto the local arms") {
    RandomEngine rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto spec = mats::testing::randomSpec(rng, 6, 4, 3);
        for (std::size_t e = 0; e < spec.groups.size(); ++e) {
            const auto size = localArmCount(spec, e);
            std::set<std::vector<std::size_t>> tuples;
            for (std::size_t a = 0; a < size; ++a) {
                const auto actions = decode(spec, e, a);
                JointArm arm(spec.numAgents, 0);
                for (std::size_t k = 0; k < actions.size(); ++k) {
                    REQUIRE(actions[k] < spec.actionCounts[spec.groups[e][k]]);
                    arm[spec.groups[e][k]] = actions[k];
                }
                CHECK(project(arm, spec, e) == a);
                tuples.insert(actions);
            }
            CHECK(tuples.size() == size);
        }
    }
}

TEST_CASE("globalMean sums the projected entries") {
    const MamabSpec single{2, {2, 2}, {{0, 1}}};
    const FactorTables table1{table2(0.75, 1.0, 0.25, 0.9)};
    CHECK(globalMean(table1, {0, 1}, single) == doctest::Approx(1.0));

    CHECK(globalMean(zeroTables(single), {1, 1}, single) == 0.0);

    // Even group uses the table, odd group its transpose; both halved.
    const auto chain = chainSpec(3);
    const FactorTables halved{table2(0.75, 1.0, 0.25, 0.9) / 2.0, table2(0.75, 0.25, 1.0, 0.9) / 2.0};
    CHECK(globalMean(halved, {0, 1, 0}, chain) == doctest::Approx(1.0));
}

TEST_CASE("globalMean is additive") {
    RandomEngine rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto spec = mats::testing::randomSpec(rng, 5, 3, 3);
        auto tables = mats::testing::randomTables(spec, rng);
        auto doubled = tables;
        for (auto & t : doubled) t *= 2.0;
        mats::testing::forEachArm(spec, [&](const JointArm & arm) {
            CHECK(globalMean(doubled, arm, spec) == doctest::Approx(2.0 * globalMean(tables, arm, spec)));
            CHECK(globalMean(tables, arm, spec) == doctest::Approx(mats::testing::evaluate(tables, spec, arm)));
        });
    }
}

TEST_CASE("derived sizes") {
    RandomEngine rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto spec = mats::testing::randomSpec(rng, 8, 4, 3);
        const double bound = static_cast<double>(spec.groups.size()) *
                             std::pow(static_cast<double>(maxActions(spec)), static_cast<double>(maxGroupSize(spec)));
        CHECK(static_cast<double>(totalLocalArms(spec)) <= bound);
    }
    const auto chain = chainSpec(10);
    CHECK(totalLocalArms(chain) == 36);
    CHECK(jointArmCount(chain) == 1024);
    CHECK(maxGroupSize(chain) == 2);
}

TEST_CASE("coordination graph mirrors group membership") {
    const MamabSpec spec{3, {2, 2, 2}, {{0, 1}, {1, 2}}};
    const auto edges = coordinationGraph(spec);
    const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 0}, {1, 0}, {1, 1}, {2, 1}};
    CHECK(edges == expected);
}

TEST_CASE("validateTables rejects bad shapes and values") {
    const MamabSpec spec{2, {2, 2}, {{0, 1}}};
    CHECK_THROWS_AS(validateTables(spec, {Vector::Zero(3)}, false), SpecError);
    CHECK_THROWS_AS(validateTables(spec, {}, false), SpecError);

    FactorTables t{Vector::Zero(4)};
    t[0][1] = kInfinity;
    CHECK_THROWS_AS(validateTables(spec, t, false), SpecError);
    CHECK_NOTHROW(validateTables(spec, t, true));
    t[0][1] = -kInfinity;
    CHECK_THROWS_AS(validateTables(spec, t, true), SpecError);
    t[0][1] = std::nan("");
    CHECK_THROWS_AS(validateTables(spec, t, true), SpecError);
}

TEST_CASE("regret against cached optimum") {
    const MamabSpec single{2, {2, 2}, {{0, 1}}};
    const Regret regret(single, {table2(0.75, 1.0, 0.25, 0.9)});

    CHECK(regret.delta(regret.optimum().arm) == 0.0);
    CHECK(regret.delta({1, 0}) == doctest::Approx(0.75));
    CHECK(regret.optimum().arm == JointArm{0, 1});
}

TEST_CASE("regret matches brute-force enumeration") {
    RandomEngine rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        MamabSpec spec;
        do {
            spec = mats::testing::randomSpec(rng, 4, 3, 3);
        } while (spec.numAgents != 4);
        const auto tables = mats::testing::randomTables(spec, rng);
        const Regret regret(spec, tables);

        double best = -kInfinity;
        mats::testing::forEachArm(spec, [&](const JointArm & arm) {
            best = std::max(best, mats::testing::evaluate(tables, spec, arm));
        });
        mats::testing::forEachArm(spec, [&](const JointArm & arm) {
            const double d = regret.delta(arm);
            CHECK(d >= 0.0);
            CHECK(d == doctest::Approx(best - mats::testing::evaluate(tables, spec, arm)).epsilon(1e-12));
        });
    }
}
