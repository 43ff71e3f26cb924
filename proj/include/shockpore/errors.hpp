#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shockpore {

/// Invalid argument to a numerical routine (non-positive density, shape
/// mismatch, degenerate statistics, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed binary container. Carries the byte offset where reading failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Time integration produced a non-finite intermediate.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, int stage)
        : std::runtime_error(what + " (RK stage " + std::to_string(stage) + ")"), stage_(stage) {}

    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

/// The solver hit an unrecoverable state (negative density, NaN, ...).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long step, double time)
        : std::runtime_error(what + " (step " + std::to_string(step) + ", t = " +
                             std::to_string(time * 1e12) + " ps)"),
          step_(step), time_(time) {}

    long step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    long step_;
    double time_;
};

}  // namespace shockpore
