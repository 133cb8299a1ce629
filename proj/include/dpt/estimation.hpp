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

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpt/model.hpp"
#include "dpt/spectral.hpp"
#include "dpt/types.hpp"

namespace dpt {

// Parameters the annealer may move. Kerr and loss are normally held at
// their measured values and freed only for model validation.
enum class FreeParam { kKappaPhi, kKappaTwo, kDrive, kNth, kKerr, kKappa };

std::string to_string(FreeParam p);

struct AnnealConfig {
    double t0 = 0.1;
    double cooling = 0.93;            // multiplicative schedule
    int iterations = 20;
    double proposal_sigma_frac = 0.05;  // Gaussian step, fraction of each value
    std::uint64_t seed = 1;
    // When set, probes worse-move costs from the start point and rescales
    // t0 so roughly half of them would be accepted early on.
    bool tune_t0 = false;
};

// Target curves; the reduced detunings are interpreted at the model's
// scale. Gap series hold |Re lambda| as positive rates. Empty series are
// skipped, with the weights renormalized and the partial flag raised.
struct FitTarget {
    std::vector<double> delta_n;
    std::vector<double> n_values;
    std::vector<double> delta_1st;   // default protocol: 6 points at the minimum
    std::vector<double> gap_1st;
    std::vector<double> delta_ssb;
    std::vector<double> gap_ssb;
    double weight_n = 1.0;
    double weight_1st = 4.0;
    double weight_ssb = 6.0;
    // Gaps span decades; linear distance on normalized series is the
    // default, the log-scale variant is exposed behind this flag.
    bool log_gap_distance = false;
};

struct ForwardCurves {
    std::vector<double> n;
    std::vector<double> gap_1st;
    std::vector<double> gap_ssb;
};

// Steady-state photon number and both gaps on the target's detuning grids.
// The reduced params are rescaled before each solve. Throws SolverError
// upward on unrecoverable failures; cost() maps those to +inf.
ForwardCurves evaluate_forward(const ModelParams& reduced, const FitTarget& target,
                               int cutoff);

struct CostBreakdown {
    double total = 0.0;
    double d_n = 0.0;
    double d_1st = 0.0;
    double d_ssb = 0.0;
    bool partial = false;  // some series missing, weights renormalized
};

// C = d(n) + 4 d(lambda_1st) + 6 d(lambda_ssb), each d the RMS distance
// between series normalized by their own max absolute value. A failed
// forward solve yields total = +inf (the proposal is then rejected).
CostBreakdown cost(const ModelParams& reduced, const FitTarget& target, int cutoff);

struct AnnealStep {
    int iteration = 0;
    double temperature = 0.0;
    ModelParams proposal;
    double cost_value = 0.0;
    bool accepted = false;
    double best_cost = 0.0;
};

struct AnnealResult {
    ModelParams best;
    double best_cost = 0.0;
    ModelParams final;
    double final_cost = 0.0;
    std::vector<AnnealStep> trace;
    double t0_used = 0.0;
};

// Metropolis annealing over the selected free parameters with the
// exponential schedule T = t0 * cooling^iteration; accepts worse moves
// with probability exp(-(C_new - C)/T); proposals violating
// non-negativity are reflected at zero. Best-ever and current states are
// tracked separately. Bit-reproducible for a fixed seed.
AnnealResult anneal(const ModelParams& init, const std::vector<FreeParam>& free_params,
                    const FitTarget& target, int cutoff, const AnnealConfig& config);

// Independent chains from distinct seeds; returns the best-cost result.
AnnealResult anneal_chains(const ModelParams& init,
                           const std::vector<FreeParam>& free_params,
                           const FitTarget& target, int cutoff,
                           const AnnealConfig& config, int n_chains);

struct SensitivityReport {
    std::vector<double> delta_grid;
    ForwardCurves base;
    // parameter name -> (decreased, increased) envelope curves
    std::map<std::string, std::pair<ForwardCurves, ForwardCurves>> envelopes;
    // kappa_two ladder: multiplicative factor -> curves
    std::map<double, ForwardCurves> kappa_two_ladder;
    // parameter name -> max relative change over the grid, per observable
    // [n, gap_1st, gap_ssb]
    std::map<std::string, std::array<double, 3>> indices;
};

struct SensitivityOptions {
    double rel_change = 0.10;
    std::vector<double> kappa_two_factors = {0.25, 0.5, 2.0, 4.0};
    int cutoff = 24;
};

// +-10% envelopes for kerr, drive and kappa plus a kappa_two ladder, with
// a scalar max-relative-change index per parameter and observable over
// the supplied (critical-region) detuning grid.
SensitivityReport sensitivity_scan(const ModelParams& reduced,
                                   std::vector<double> delta_grid,
                                   const SensitivityOptions& opts = {});

}  // namespace dpt
