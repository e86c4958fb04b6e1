#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "sqlgen/gatenet/model.hpp"

namespace sqlgen::gatenet {

/// Denominator floor of the relative error |a - n| / max(|a|, |n|, floor).
/// At epsilon 1e-5 one ulp of a loss near 3 moves a central difference by
/// about 2e-11, so smaller gradients cannot be resolved to 1e-4 relative;
/// below the floor entries are effectively held to |a - n| <= 1e-10.
inline constexpr double kGradCheckFloor = 1e-6;

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::string worst_parameter;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t checked = 0;
};

/// Compares the analytic gradient of the mean token loss with central finite
/// differences for every parameter entry. Throws std::runtime_error when a
/// loss or gradient is not finite.
GradCheckResult grad_check(const GateModel& model, std::span<const int> src,
                           std::span<const int> tgt, double epsilon = 1e-5);

/// Central-difference derivative of the loss along one parameter entry.
double numeric_derivative(const GateModel& model, std::span<const int> src,
                          std::span<const int> tgt, const std::string& parameter,
                          std::size_t index, double epsilon);

}  // namespace sqlgen::gatenet
