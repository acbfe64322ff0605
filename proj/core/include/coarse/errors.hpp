#pragma once
#include <stdexcept>
#include <string>

namespace coarse {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DisconnectedGraph : Error { using Error::Error; };
struct InvalidSpace : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct ChainUnreachable : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct DegenerateProfile : Error { using Error::Error; };
struct SupportViolation : Error { using Error::Error; };
struct BadExponent : Error { using Error::Error; };
struct BadRetraction : Error { using Error::Error; };
struct MissingScale : Error { using Error::Error; };
struct NoSubsequence : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct Degenerate : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };
struct NotACube : Error { using Error::Error; };
struct NotATree : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

} // namespace coarse
