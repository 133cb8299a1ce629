// Copyright 2026 The dptsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <span>

#include "dpt/types.hpp"

namespace dpt {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double r_squared = 0.0;
};

LinearFit linear_least_squares(std::span<const double> x, std::span<const double> y);

// Weighted general linear least squares y ~ X beta; returns beta and its
// covariance scaled by the residual variance.
struct GeneralLinearFit {
    RVec beta;
    RMat covariance;
    double chi2 = 0.0;
};
GeneralLinearFit linear_solve(const RMat& design, const RVec& y);

struct LMOptions {
    int max_iterations = 200;
    double ftol = 1e-12;
    double lambda0 = 1e-3;
    double step_rel = 1e-6;  // numeric Jacobian step (relative)
};

struct LMResult {
    RVec params;
    RMat covariance;  // residual-variance scaled (J^T J)^-1
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Small Levenberg-Marquardt with a forward-difference Jacobian. The model
// callback returns the residual vector r(p); the objective is |r|^2.
LMResult levenberg_marquardt(const std::function<RVec(const RVec&)>& residuals,
                             RVec initial, const LMOptions& opts = {});

}  // namespace dpt
