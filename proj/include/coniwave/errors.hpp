#ifndef CONIWAVE_ERRORS_HPP
#define CONIWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coniwave {

struct OnCrossingSet : std::runtime_error {
    explicit OnCrossingSet(const std::string& m) : std::runtime_error(m) {}
};

struct DegenerateCrossing : std::runtime_error {
    explicit DegenerateCrossing(const std::string& m) : std::runtime_error(m) {}
};

struct StiffnessFailure : std::runtime_error {
    explicit StiffnessFailure(const std::string& m) : std::runtime_error(m) {}
};

// Trajectory came close to the crossing set without passing through it.
struct NearMissCrossing : std::runtime_error {
    explicit NearMissCrossing(const std::string& m) : std::runtime_error(m) {}
};

struct NotAnEigenvector : std::runtime_error {
    explicit NotAnEigenvector(const std::string& m) : std::runtime_error(m) {}
};

struct NoCrossing : std::runtime_error {
    explicit NoCrossing(const std::string& m) : std::runtime_error(m) {}
};

struct AtCrossingTime : std::runtime_error {
    explicit AtCrossingTime(const std::string& m) : std::runtime_error(m) {}
};

struct GridOverflow : std::runtime_error {
    explicit GridOverflow(const std::string& m) : std::runtime_error(m) {}
};

struct OutOfBox : std::runtime_error {
    explicit OutOfBox(const std::string& m) : std::runtime_error(m) {}
};

struct CrossingMismatch : std::runtime_error {
    explicit CrossingMismatch(const std::string& m) : std::runtime_error(m) {}
};

struct PoleOfGamma : std::runtime_error {
    explicit PoleOfGamma(const std::string& m) : std::runtime_error(m) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace coniwave

#endif
