#pragma once

#include <stdexcept>
#include <string>

namespace hypflow {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke an interface contract (mismatched sizes, non-finite data, ...).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Explicit step refused because dt exceeds the monotonicity limit.
class CflViolation : public ContractError {
public:
    CflViolation(double requested, double admissible)
        : ContractError("time step " + std::to_string(requested) +
                        " exceeds admissible dt " + std::to_string(admissible)),
          requested_(requested), admissible_(admissible) {}

    double requested_dt() const noexcept { return requested_; }
    double admissible_dt() const noexcept { return admissible_; }

private:
    double requested_;
    double admissible_;
};

/// A precondition of a constructive bound does not hold (e.g. R < Lambda).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A derived identity that should be unreachable was violated.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Initial-data generator could not meet the curvature cap.
class GenerationError : public std::runtime_error {
public:
    GenerationError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved_bound() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Every run of a sweep was censored; nothing to fit.
class SweepInconclusive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration; `key()` names the offending entry when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key = {})
        : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace hypflow
