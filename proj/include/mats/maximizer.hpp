#ifndef MATS_MAXIMIZER_HEADER_FILE
#define MATS_MAXIMIZER_HEADER_FILE

#include <mats/model.hpp>

namespace mats {
    /// A permutation of agent indices; agents are eliminated front to back.
    using EliminationOrder = std::vector<std::size_t>;

    struct MaxResult {
        JointArm arm;
        /// Sum of the factors re-evaluated at arm.
        double value;
    };

    constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

    /**
     * @brief Exhaustive argmax over every joint arm.
     *
     * Ties go to the lexicographically smallest joint arm. Throws
     * SpecError(JointSpaceTooLarge) when the joint space exceeds the cap.
     */
    MaxResult bruteForceArgmax(const FactorTables & tables, const MamabSpec & spec,
                               std::uint64_t cap = kDefaultBruteForceCap);

    /**
     * @brief Greedy min-degree elimination order.
     *
     * Repeatedly picks the agent with the fewest neighbours in the
     * agent-interaction graph (agents sharing a group), connecting its
     * neighbours after removal. Ties go to the lowest agent index.
     */
    EliminationOrder chooseOrder(const MamabSpec & spec);

    /// Throws SpecError unless order is a permutation of the agents.
    void validateOrder(const MamabSpec & spec, const EliminationOrder & order);

    /**
     * @brief Exact maximization of the sum of factors by variable elimination.
     *
     * Each elimination joins every factor mentioning the agent, maxes over
     * its actions (lowest action wins ties) and records the best response
     * for backtracking. Entries may be +inf, in which case +inf absorbs any
     * finite addend; -inf and NaN are rejected.
     */
    MaxResult variableElimination(const FactorTables & tables, const MamabSpec & spec,
                                  const EliminationOrder & order);

    /// Same as above, with the order given by chooseOrder.
    MaxResult variableElimination(const FactorTables & tables, const MamabSpec & spec);

    /// Largest number of other agents in a joined scope over the elimination.
    std::size_t inducedWidth(const MamabSpec & spec, const EliminationOrder & order);
}

#endif
