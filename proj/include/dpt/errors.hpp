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

#include <stdexcept>
#include <string>

namespace dpt {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: invalid dimensions, malformed configs, missing units.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

// A linear solve, eigensolve or fit failed to produce a usable result.
class SolverError : public Error {
public:
    using Error::Error;
};

// Iteration reached a configured cap without meeting its tolerance.
// Carries the last two iterates so callers can inspect how close it got.
class ConvergenceCapError : public Error {
public:
    ConvergenceCapError(const std::string& what, double last, double previous)
        : Error(what), last_value(last), previous_value(previous) {}
    double last_value;
    double previous_value;
};

// Not enough samples/points for the requested statistic.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// A quantity is undefined for the given (degenerate) input.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// A structural symmetry that must hold by construction was violated;
// signals a model-assembly bug rather than a numerical issue.
class SymmetryViolationError : public Error {
public:
    using Error::Error;
};

}  // namespace dpt
