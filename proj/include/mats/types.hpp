#ifndef MATS_TYPES_HEADER_FILE
#define MATS_TYPES_HEADER_FILE

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mats {
    using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1>;

    /// Per-run random engine. Every stochastic operation takes one explicitly.
    using RandomEngine = std::mt19937_64;

    using Agents = std::vector<std::size_t>;

    constexpr double kInfinity = std::numeric_limits<double>::infinity();

    /**
     * @brief Error raised when a problem description breaks a structural invariant.
     *
     * The kind is kept separately from the message so that callers (the
     * CLI, tests) can branch on it without parsing text.
     */
    class SpecError : public std::invalid_argument {
        public:
            enum class Kind {
                OrphanAgent,
                EmptyGroup,
                NoGroups,
                ActionIndexOutOfRange,
                NonCanonicalGroupOrder,
                TableSizeMismatch,
                InvalidValue,
                InvalidSize,
                JointSpaceTooLarge,
                SupportViolation,
                Config,
            };

            SpecError(Kind kind, const std::string & what) :
                    std::invalid_argument(what), kind_(kind) {}

            Kind kind() const { return kind_; }

        private:
            Kind kind_;
    };
}

#endif
