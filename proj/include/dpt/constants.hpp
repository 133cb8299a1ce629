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

namespace dpt {

// 2019 SI exact values
inline constexpr double kPlanck = 6.62607015e-34;        // J s
inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kBoltzmann = 1.380649e-23;       // J / K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kReducedFluxQuantum = kHbar / (2.0 * kElementaryCharge);

}  // namespace dpt
