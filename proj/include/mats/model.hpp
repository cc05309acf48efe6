#ifndef MATS_MODEL_HEADER_FILE
#define MATS_MODEL_HEADER_FILE

#include <utility>

#include <mats/types.hpp>

namespace mats {
    /// One action index per agent.
    using JointArm = std::vector<std::size_t>;

    /**
     * @brief One real value per local arm, for every group.
     *
     * tables[e] has exactly localArmCount(spec, e) entries. The same carrier
     * holds true means, posterior samples, running estimates and UCB scores.
     */
    using FactorTables = std::vector<Vector>;

    /**
     * @brief The structure of a multi-agent multi-armed bandit.
     *
     * Groups hold the agents each local reward depends on, in strictly
     * increasing order. Groups may overlap and may even be identical.
     */
    struct MamabSpec {
        std::size_t numAgents = 0;
        std::vector<std::size_t> actionCounts;
        std::vector<Agents> groups;

        bool operator==(const MamabSpec &) const = default;
    };

    /// Throws SpecError if any structural invariant of the spec is broken.
    void validate(const MamabSpec & spec);

    /// Throws SpecError unless the arm has one in-range action per agent.
    void validateArm(const MamabSpec & spec, const JointArm & arm);

    /**
     * @brief Checks that there is one table per group with the right size.
     *
     * NaN and -inf are always rejected; +inf only when allowInfinity is set
     * (optimistic-initialization tables).
     */
    void validateTables(const MamabSpec & spec, const FactorTables & tables, bool allowInfinity);

    /// Number of local arms |A^e| of group e.
    std::size_t localArmCount(const MamabSpec & spec, std::size_t e);

    /// Total number of local arms over all groups.
    std::size_t totalLocalArms(const MamabSpec & spec);

    /// Largest per-agent action count.
    std::size_t maxActions(const MamabSpec & spec);

    /// Largest group size.
    std::size_t maxGroupSize(const MamabSpec & spec);

    /// Size of the joint arm space, saturated at the max of uint64.
    std::uint64_t jointArmCount(const MamabSpec & spec);

    /**
     * @brief Flat index of the restriction of an arm onto group e.
     *
     * Mixed-radix encoding where the first agent of the group is the most
     * significant digit.
     */
    std::size_t project(const JointArm & arm, const MamabSpec & spec, std::size_t e);

    /// Inverse of project for a single group: the actions of the group's agents.
    std::vector<std::size_t> decode(const MamabSpec & spec, std::size_t e, std::size_t index);

    /// Sum over groups of tables[e] at the projection of the arm.
    double globalMean(const FactorTables & tables, const JointArm & arm, const MamabSpec & spec);

    /// Edges (agent, group) of the bipartite coordination graph.
    std::vector<std::pair<std::size_t, std::size_t>> coordinationGraph(const MamabSpec & spec);

    /// Zero-filled tables with the right shape.
    FactorTables zeroTables(const MamabSpec & spec);
}

#endif
