#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdqda {

// Bad input: wrong shapes, violated preconditions, unparsable data.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine could not produce a result (non-SPD input, singular
// sample covariance, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public NumericalError {
public:
    explicit NotPositiveDefinite(std::size_t pivot)
        : NumericalError("not positive definite (pivot " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

}  // namespace mdqda
