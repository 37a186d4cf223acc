#pragma once

#include <stdexcept>
#include <string>

namespace rrpolicy {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A constant column cannot be standardized; caller may drop it.
struct ZeroVarianceColumn : Error {
    int column;
    explicit ZeroVarianceColumn(int col)
        : Error("zero-variance column at index " + std::to_string(col)), column(col) {}
};

struct SingularDesign : Error {
    using Error::Error;
};

struct SingularCovariance : Error {
    using Error::Error;
};

struct RankTooLarge : Error {
    using Error::Error;
};

struct InvalidRank : Error {
    using Error::Error;
};

struct Separation : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    using Error::Error;
};

struct PropensityOutOfRange : Error {
    using Error::Error;
};

struct ModelMissingForArm : Error {
    int arm;
    explicit ModelMissingForArm(int a)
        : Error("no fitted outcome model for arm " + std::to_string(a)), arm(a) {}
};

// Objective or gradient became non-finite; carries the last finite iterate.
struct NonFiniteValue : Error {
    std::vector<double> last_good_theta;
    NonFiniteValue(std::string msg, std::vector<double> theta)
        : Error(std::move(msg)), last_good_theta(std::move(theta)) {}
};

struct ValidationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace rrpolicy
