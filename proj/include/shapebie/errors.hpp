// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace shapebie {

struct DeformationTooLarge : std::runtime_error {
    explicit DeformationTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfChart : std::runtime_error {
    explicit OutOfChart(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularArgument : std::runtime_error {
    explicit SingularArgument(const std::string& what) : std::runtime_error(what) {}
};

struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

struct TooCloseToBoundary : std::runtime_error {
    explicit TooCloseToBoundary(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

struct EvaluationFailed : std::runtime_error {
    explicit EvaluationFailed(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shapebie
