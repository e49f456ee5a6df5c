#pragma once

#include <stdexcept>
#include <string>

namespace kuramoto {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Graph construction / validation
struct DisconnectedGraph : Error { using Error::Error; };
struct DuplicateEdge : Error { using Error::Error; };
struct NonpositiveWeight : Error { using Error::Error; };
struct SelfLoop : Error { using Error::Error; };
struct SingularBeyondKernel : Error { using Error::Error; };
struct UncenteredFrequencies : Error { using Error::Error; };

// Scalar-function and series domains
struct DomainError : Error { using Error::Error; };
struct OrderNotComputed : Error { using Error::Error; };

// Solvers
struct MaxIterationsExceeded : Error { using Error::Error; };
struct IterateLeftDomain : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct NotAFlowSine : Error { using Error::Error; };

// Scans
struct NoSolutionAtK0 : Error { using Error::Error; };
struct TestNeverFails : Error { using Error::Error; };
struct NonMonotoneDetected : Error { using Error::Error; };

// Generators
struct RetriesExhausted : Error { using Error::Error; };

// I/O
struct ParseError : Error { using Error::Error; };

} // namespace kuramoto
