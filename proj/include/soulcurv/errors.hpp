#pragma once

#include <stdexcept>
#include <string>

namespace soulcurv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested derivative order above the jet truncation degree.
struct UnsupportedOrderError : Error {
    using Error::Error;
};

// Finite-difference step underflowed to zero after scaling.
struct StepTooSmallError : Error {
    using Error::Error;
};

// SPD factorization hit a non-positive pivot; message names the pivot.
struct FactorizationError : Error {
    FactorizationError(int pivot_index, double pivot_value)
        : Error("SPD factorization failed at pivot " + std::to_string(pivot_index) +
                " (value " + std::to_string(pivot_value) + ")"),
          pivot(pivot_index), value(pivot_value) {}
    int pivot;
    double value;
};

struct ChartError : Error {
    using Error::Error;
};

// Degenerate frame request (theta at an endpoint, non-orthonormal inputs, ...).
struct FrameError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct IntegrationError : Error {
    using Error::Error;
};

struct LoopClosureError : Error {
    using Error::Error;
};

struct OptimizationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    ConfigError(int line_number, const std::string& key, const std::string& what)
        : Error("config line " + std::to_string(line_number) + ", key '" + key + "': " + what),
          line(line_number), offending_key(key) {}
    explicit ConfigError(const std::string& what) : Error(what), line(0) {}
    int line = 0;
    std::string offending_key;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace soulcurv
