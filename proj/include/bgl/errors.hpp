#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bgl {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Knot or endpoint that does not sit on a grid point.
struct GridAlignmentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrderingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted(const std::string& what, std::size_t attempts)
        : std::runtime_error(what + " (attempts=" + std::to_string(attempts) + ")"),
          attempts_(attempts) {}
    std::size_t attempts() const noexcept { return attempts_; }

private:
    std::size_t attempts_;
};

}  // namespace bgl
