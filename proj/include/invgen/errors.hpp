#pragma once

#include <stdexcept>
#include <string>

namespace invgen {

// Error taxonomy shared across modules. CLI maps these onto exit codes:
// invalid_input -> 2, algorithm_failure -> 3, capacity -> 4.
struct invalid_input_error : std::runtime_error {
    explicit invalid_input_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Probability-delta events: infeasible systems, failed inversions, exhausted
// samplers. These are expected outcomes of randomized algorithms, not bugs.
struct algorithm_failure : std::runtime_error {
    explicit algorithm_failure(const std::string& msg) : std::runtime_error(msg) {}
};

struct infeasible_error : algorithm_failure {
    explicit infeasible_error(const std::string& msg) : algorithm_failure(msg) {}
};

struct sampler_failure : algorithm_failure {
    explicit sampler_failure(const std::string& msg) : algorithm_failure(msg) {}
};

struct unsupported_class_error : invalid_input_error {
    explicit unsupported_class_error(const std::string& msg) : invalid_input_error(msg) {}
};

} // namespace invgen
