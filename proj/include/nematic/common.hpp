#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <stdexcept>
#include <string>

namespace nematic {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Tolerances shared by all modules.
struct Tolerances {
    static constexpr double unit = 1e-12;      // unit-norm invariant of directions
    static constexpr double quad = 1e-10;      // quadrature exactness checks
    static constexpr double tangency = 1e-10;  // (grad u) u = 0
    static constexpr double gap_floor = 1e-9;  // leading eigenvalue simplicity
    static constexpr double rho_floor = 1e-12; // macro density positivity
};

// Process exit codes of the CLI; also carried by the exception types.
enum class ExitCode : int { ok = 0, config = 2, numerical = 3, degenerate = 4 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error(ExitCode::numerical, what) {}
};

inline std::string format_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

class DegenerateLeadingEigenvalue : public Error {
public:
    DegenerateLeadingEigenvalue(double gap, double floor)
        : Error(ExitCode::degenerate,
                "leading eigenvalue not simple: gap " + format_g(gap) + " below floor " + format_g(floor)),
          gap_(gap) {}
    double gap() const { return gap_; }

private:
    double gap_;
};

class DimensionMismatch : public std::invalid_argument {
public:
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b)
        throw DimensionMismatch(std::string(where) + ": dimension " + std::to_string(a) + " vs " +
                                std::to_string(b));
}

}  // namespace nematic
