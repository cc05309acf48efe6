#include <mats/model.hpp>

#include <algorithm>
#include <cmath>

namespace mats {
    void validate(const MamabSpec & spec) {
        if (spec.numAgents == 0 || spec.actionCounts.size() != spec.numAgents)
            throw SpecError(SpecError::Kind::InvalidSize,
                            "spec declares " + std::to_string(spec.numAgents) + " agents but " +
                            std::to_string(spec.actionCounts.size()) + " action counts");

        for (std::size_t i = 0; i < spec.numAgents; ++i)
            if (spec.actionCounts[i] == 0)
                throw SpecError(SpecError::Kind::ActionIndexOutOfRange,
                                "agent " + std::to_string(i) + " has an empty action set");

        if (spec.groups.empty())
            throw SpecError(SpecError::Kind::NoGroups, "spec has no groups");

        std::vector<bool> covered(spec.numAgents, false);
        for (std::size_t e = 0; e < spec.groups.size(); ++e) {
            const auto & group = spec.groups[e];
            if (group.empty())
                throw SpecError(SpecError::Kind::EmptyGroup, "group " + std::to_string(e) + " is empty");
            for (std::size_t k = 0; k < group.size(); ++k) {
                if (group[k] >= spec.numAgents)
                    throw SpecError(SpecError::Kind::ActionIndexOutOfRange,
                                    "group " + std::to_string(e) + " references agent " +
                                    std::to_string(group[k]) + " out of range");
                if (k > 0 && group[k] <= group[k - 1])
                    throw SpecError(SpecError::Kind::NonCanonicalGroupOrder,
                                    "group " + std::to_string(e) + " is not strictly increasing");
                covered[group[k]] = true;
            }
        }

        for (std::size_t i = 0; i < spec.numAgents; ++i)
            if (!covered[i])
                throw SpecError(SpecError::Kind::OrphanAgent,
                                "agent " + std::to_string(i) + " does not belong to any group");
    }

    void validateArm(const MamabSpec & spec, const JointArm & arm) {
        if (arm.size() != spec.numAgents)
            throw SpecError(SpecError::Kind::InvalidSize, "joint arm has wrong length");
        for (std::size_t i = 0; i < arm.size(); ++i)
            if (arm[i] >= spec.actionCounts[i])
                throw SpecError(SpecError::Kind::ActionIndexOutOfRange,
                                "action of agent " + std::to_string(i) + " out of range");
    }

    void validateTables(const MamabSpec & spec, const FactorTables & tables, bool allowInfinity) {
        if (tables.size() != spec.groups.size())
            throw SpecError(SpecError::Kind::TableSizeMismatch, "expected one table per group");
        for (std::size_t e = 0; e < tables.size(); ++e) {
            if (static_cast<std::size_t>(tables[e].size()) != localArmCount(spec, e))
                throw SpecError(SpecError::Kind::TableSizeMismatch,
                                "table " + std::to_string(e) + " has the wrong number of local arms");
            for (const double v : tables[e]) {
                const bool ok = std::isfinite(v) || (allowInfinity && v == kInfinity);
                if (!ok)
                    throw SpecError(SpecError::Kind::InvalidValue,
                                    "table " + std::to_string(e) + " contains a non-finite value");
            }
        }
    }

    std::size_t localArmCount(const MamabSpec & spec, const std::size_t e) {
        std::size_t count = 1;
        for (const auto agent : spec.groups[e])
            count *= spec.actionCounts[agent];
        return count;
    }

    std::size_t totalLocalArms(const MamabSpec & spec) {
        std::size_t total = 0;
        for (std::size_t e = 0; e < spec.groups.size(); ++e)
            total += localArmCount(spec, e);
        return total;
    }

    std::size_t maxActions(const MamabSpec & spec) {
        return spec.actionCounts.empty() ? 0 : *std::max_element(spec.actionCounts.begin(), spec.actionCounts.end());
    }

    std::size_t maxGroupSize(const MamabSpec & spec) {
        std::size_t d = 0;
        for (const auto & group : spec.groups)
            d = std::max(d, group.size());
        return d;
    }

    std::uint64_t jointArmCount(const MamabSpec & spec) {
        constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
        std::uint64_t count = 1;
        for (const auto a : spec.actionCounts) {
            if (a != 0 && count > cap / a)
                return cap;
            count *= a;
        }
        return count;
    }

    std::size_t project(const JointArm & arm, const MamabSpec & spec, const std::size_t e) {
        std::size_t index = 0;
        for (const auto agent : spec.groups[e])
            index = index * spec.actionCounts[agent] + arm[agent];
        return index;
    }

    std::vector<std::size_t> decode(const MamabSpec & spec, const std::size_t e, std::size_t index) {
        const auto & group = spec.groups[e];
        std::vector<std::size_t> actions(group.size());
        for (std::size_t k = group.size(); k-- > 0;) {
            const auto base = spec.actionCounts[group[k]];
            actions[k] = index % base;
            index /= base;
        }
        return actions;
    }

    double globalMean(const FactorTables & tables, const JointArm & arm, const MamabSpec & spec) {
        double sum = 0.0;
        for (std::size_t e = 0; e < spec.groups.size(); ++e)
            sum += tables[e][project(arm, spec, e)];
        return sum;
    }

    std::vector<std::pair<std::size_t, std::size_t>> coordinationGraph(const MamabSpec & spec) {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t e = 0; e < spec.groups.size(); ++e)
            for (const auto agent : spec.groups[e])
                edges.emplace_back(agent, e);
        std::sort(edges.begin(), edges.end());
        return edges;
    }

    FactorTables zeroTables(const MamabSpec & spec) {
        FactorTables tables;
        tables.reserve(spec.groups.size());
        for (std::size_t e = 0; e < spec.groups.size(); ++e)
            tables.push_back(Vector::Zero(static_cast<Eigen::Index>(localArmCount(spec, e))));
        return tables;
    }
}
