#ifndef PARNF_ERRORS_HPP
#define PARNF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace parnf {

// Precondition violations on user-supplied data.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& m) : std::runtime_error("DomainError: " + m) {}
};

// A numerical routine refused to certify its result (ill conditioning,
// clustered roots, non-convergence ...).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& m) : std::runtime_error("NumericalError: " + m) {}
};

// Two independent internal routes disagreed; indicates a bug, never bad input.
struct InternalConsistencyError : std::runtime_error {
    explicit InternalConsistencyError(const std::string& m)
        : std::runtime_error("InternalConsistencyError: " + m) {}
};

} // namespace parnf

#endif
