#include <mats/maximizer.hpp>

#include <algorithm>
#include <iterator>
#include <set>

namespace mats {
    namespace {
        struct Factor {
            Agents scope;
            Vector values;
        };

        struct BestResponse {
            std::size_t agent;
            Agents scope;
            std::vector<std::size_t> best;
        };

        Agents unionScope(const std::vector<Factor> & factors, const std::size_t removed) {
            Agents scope;
            for (const auto & f : factors) {
                Agents merged;
                std::set_union(scope.begin(), scope.end(), f.scope.begin(), f.scope.end(),
                               std::back_inserter(merged));
                scope = std::move(merged);
            }
            scope.erase(std::remove(scope.begin(), scope.end(), removed), scope.end());
            return scope;
        }

        // Strides of a mixed-radix index where the first agent is most significant.
        std::vector<std::size_t> strides(const Agents & scope, const MamabSpec & spec) {
            std::vector<std::size_t> retval(scope.size());
            std::size_t stride = 1;
            for (std::size_t k = scope.size(); k-- > 0;) {
                retval[k] = stride;
                stride *= spec.actionCounts[scope[k]];
            }
            return retval;
        }
    }

    MaxResult bruteForceArgmax(const FactorTables & tables, const MamabSpec & spec, const std::uint64_t cap) {
        validate(spec);
        validateTables(spec, tables, true);
        if (jointArmCount(spec) > cap)
            throw SpecError(SpecError::Kind::JointSpaceTooLarge,
                            "joint arm space exceeds the brute-force cap");

        JointArm arm(spec.numAgents, 0);
        MaxResult best{arm, globalMean(tables, arm, spec)};

        // Odometer with the last agent fastest enumerates arms in
        // lexicographic order, so a strict comparison keeps the smallest.
        while (true) {
            std::size_t i = spec.numAgents;
            while (i-- > 0) {
                if (++arm[i] < spec.actionCounts[i]) break;
                arm[i] = 0;
            }
            if (i == static_cast<std::size_t>(-1)) break;

            const double v = globalMean(tables, arm, spec);
            if (v > best.value) {
                best.arm = arm;
                best.value = v;
            }
        }
        return best;
    }

    EliminationOrder chooseOrder(const MamabSpec & spec) {
        validate(spec);
        std::vector<std::set<std::size_t>> adjacency(spec.numAgents);
        for (const auto & group : spec.groups)
            for (const auto i : group)
                for (const auto j : group)
                    if (i != j) adjacency[i].insert(j);

        std::vector<bool> removed(spec.numAgents, false);
        EliminationOrder order;
        order.reserve(spec.numAgents);
        for (std::size_t step = 0; step < spec.numAgents; ++step) {
            std::size_t pick = spec.numAgents;
            for (std::size_t i = 0; i < spec.numAgents; ++i) {
                if (removed[i]) continue;
                if (pick == spec.numAgents || adjacency[i].size() < adjacency[pick].size())
                    pick = i;
            }
            for (const auto u : adjacency[pick]) {
                adjacency[u].erase(pick);
                for (const auto v : adjacency[pick])
                    if (u != v) adjacency[u].insert(v);
            }
            adjacency[pick].clear();
            removed[pick] = true;
            order.push_back(pick);
        }
        return order;
    }

    void validateOrder(const MamabSpec & spec, const EliminationOrder & order) {
        if (order.size() != spec.numAgents)
            throw SpecError(SpecError::Kind::InvalidSize, "elimination order has wrong length");
        std::vector<bool> seen(spec.numAgents, false);
        for (const auto i : order) {
            if (i >= spec.numAgents || seen[i])
                throw SpecError(SpecError::Kind::InvalidValue, "elimination order is not a permutation");
            seen[i] = true;
        }
    }

    MaxResult variableElimination(const FactorTables & tables, const MamabSpec & spec) {
        return variableElimination(tables, spec, chooseOrder(spec));
    }

    MaxResult variableElimination(const FactorTables & tables, const MamabSpec & spec,
                                  const EliminationOrder & order) {
        validate(spec);
        validateTables(spec, tables, true);
        validateOrder(spec, order);

        std::vector<Factor> factors;
        factors.reserve(tables.size());
        for (std::size_t e = 0; e < tables.size(); ++e)
            factors.push_back({spec.groups[e], tables[e]});

        std::vector<BestResponse> responses;
        responses.reserve(order.size());

        for (const auto agent : order) {
            const auto split = std::stable_partition(factors.begin(), factors.end(), [agent](const Factor & f) {
                return !std::binary_search(f.scope.begin(), f.scope.end(), agent);
            });
            std::vector<Factor> joined(std::make_move_iterator(split), std::make_move_iterator(factors.end()));
            factors.erase(split, factors.end());

            Factor result{unionScope(joined, agent), {}};
            const auto resultStrides = strides(result.scope, spec);
            const std::size_t resultSize = result.scope.empty() ? 1 : resultStrides[0] * spec.actionCounts[result.scope[0]];

            // For each joined factor: where each of its scope agents sits in
            // the result scope, with the matching stride in the factor.
            struct Lookup {
                std::vector<std::pair<std::size_t, std::size_t>> positions;
                std::size_t agentStride;
            };
            std::vector<Lookup> lookups;
            lookups.reserve(joined.size());
            for (const auto & f : joined) {
                const auto fStrides = strides(f.scope, spec);
                Lookup l{{}, 0};
                for (std::size_t k = 0; k < f.scope.size(); ++k) {
                    if (f.scope[k] == agent) {
                        l.agentStride = fStrides[k];
                        continue;
                    }
                    const auto pos = std::lower_bound(result.scope.begin(), result.scope.end(), f.scope[k]) - result.scope.begin();
                    l.positions.emplace_back(static_cast<std::size_t>(pos), fStrides[k]);
                }
                lookups.push_back(std::move(l));
            }

            const std::size_t actions = spec.actionCounts[agent];
            BestResponse response{agent, result.scope, std::vector<std::size_t>(resultSize, 0)};
            result.values.resize(static_cast<Eigen::Index>(resultSize));

            std::vector<std::size_t> assignment(result.scope.size(), 0);
            std::vector<std::size_t> bases(joined.size());
            for (std::size_t idx = 0; idx < resultSize; ++idx) {
                for (std::size_t f = 0; f < joined.size(); ++f) {
                    std::size_t base = 0;
                    for (const auto & [pos, stride] : lookups[f].positions)
                        base += assignment[pos] * stride;
                    bases[f] = base;
                }

                double bestValue = 0.0;
                std::size_t bestAction = 0;
                for (std::size_t a = 0; a < actions; ++a) {
                    double v = 0.0;
                    for (std::size_t f = 0; f < joined.size(); ++f)
                        v += joined[f].values[static_cast<Eigen::Index>(bases[f] + a * lookups[f].agentStride)];
                    if (a == 0 || v > bestValue) {
                        bestValue = v;
                        bestAction = a;
                    }
                }
                result.values[static_cast<Eigen::Index>(idx)] = bestValue;
                response.best[idx] = bestAction;

                for (std::size_t k = assignment.size(); k-- > 0;) {
                    if (++assignment[k] < spec.actionCounts[result.scope[k]]) break;
                    assignment[k] = 0;
                }
            }

            responses.push_back(std::move(response));
            factors.push_back(std::move(result));
        }

        JointArm arm(spec.numAgents, 0);
        for (auto it = responses.rbegin(); it != responses.rend(); ++it) {
            std::size_t index = 0;
            for (const auto other : it->scope)
                index = index * spec.actionCounts[other] + arm[other];
            arm[it->agent] = it->best[index];
        }

        return {arm, globalMean(tables, arm, spec)};
    }

    std::size_t inducedWidth(const MamabSpec & spec, const EliminationOrder & order) {
        validate(spec);
        validateOrder(spec, order);

        std::vector<Agents> scopes(spec.groups.begin(), spec.groups.end());
        std::size_t width = 0;
        for (const auto agent : order) {
            std::set<std::size_t> joined;
            std::vector<Agents> kept;
            for (auto & scope : scopes) {
                if (std::binary_search(scope.begin(), scope.end(), agent))
                    joined.insert(scope.begin(), scope.end());
                else
                    kept.push_back(std::move(scope));
            }
            joined.erase(agent);
            width = std::max(width, joined.size());
            kept.emplace_back(joined.begin(), joined.end());
            scopes = std::move(kept);
        }
        return width;
    }
}
