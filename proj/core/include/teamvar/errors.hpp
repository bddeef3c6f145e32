#pragma once

#include <stdexcept>
#include <string>

namespace teamvar {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A chain has two or more closed communicating classes, so the stationary
/// distribution (and everything built on it) is not unique.
class MultichainError : public Error {
public:
    explicit MultichainError(const std::string& what, int player = -1, int iteration = -1)
        : Error(what), player_(player), iteration_(iteration) {}
    /// Index of the offending player, or -1 when not applicable.
    int player() const { return player_; }
    /// Optimizer iteration at which the chain became multichain, or -1.
    int iteration() const { return iteration_; }

private:
    int player_;
    int iteration_;
};

/// A dense linear solve was rank-deficient beyond the configured tolerance.
class SingularError : public Error {
public:
    using Error::Error;
};

/// A policy selects an action outside the state's admissible set.
class InadmissibleActionError : public Error {
public:
    using Error::Error;
};

/// A precomputed ChainAnalysis does not match the model it is used with.
class AnalysisMismatchError : public Error {
public:
    using Error::Error;
};

/// Model data violates a structural invariant (bad probability row,
/// non-finite reward, empty admissible set, ...).
class InvalidModelError : public Error {
public:
    using Error::Error;
};

/// Benchmark parameters that cannot produce a valid game.
class BadParamsError : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration was requested for a policy space above the cap.
class TooLargeError : public Error {
public:
    using Error::Error;
};

/// A scenario document failed to parse or validate; the message carries
/// player/state/field context.
class ScenarioParseError : public Error {
public:
    using Error::Error;
};

} // namespace teamvar
