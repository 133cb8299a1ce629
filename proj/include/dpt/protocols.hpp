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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpt/model.hpp"
#include "dpt/trajectories.hpp"
#include "dpt/types.hpp"

namespace dpt {

// Linear ramp segment executed as piecewise-constant steps of length
// `dwell` (one acquisition window per step).
struct SweepSegment {
    double duration = 0.0;
    double delta_start = 0.0, delta_end = 0.0;
    double drive_start = 0.0, drive_end = 0.0;
};

struct SweepSchedule {
    std::vector<SweepSegment> segments;
    double dwell = 0.0;  // tau_int + tau_delay per step

    bool valid() const {
        if (dwell <= 0.0 || segments.empty()) return false;
        for (const auto& s : segments) {
            if (s.duration <= 0.0 || s.duration < 2.0 * dwell) return false;
        }
        return true;
    }
};

struct SweepResult {
    std::vector<double> times;
    std::vector<double> delta;   // value held during each step
    std::vector<double> drive;
    std::vector<double> n_vals;  // window mean of <n> per step
    std::vector<double> i_vals;
    std::vector<double> q_vals;
    CVec final_state;
};

// Runs a schedule as stochastic piecewise-constant evolution. Rates other
// than (delta, drive) come from `params` and stay fixed.
SweepResult run_schedule(const ModelParams& params, const SweepSchedule& schedule,
                         const CVec& psi0, double dt, std::uint64_t seed,
                         const TrajectoryOptions& opts = {});

enum class InitialState { kVacuum, kBright };

struct DecayOptions {
    int n_traj = 200;
    int pilot_traj = 100;
    double horizon = 0.0;        // 0: set to 3/lambda from the pilot run
    double pilot_horizon = 0.0;  // 0: 20/kappa
    double dt = 0.0;             // 0: from the step-size precondition
    double tau_int = 0.0;
    int cutoff = 24;
    std::uint64_t seed = 1;
    int bootstrap = 100;
    int workers = 1;
};

struct DecayResult {
    double lambda = 0.0;         // fitted |Re lambda_1st|
    double ci_low = 0.0;         // 95% bootstrap interval over trajectories
    double ci_high = 0.0;
    double n_ss = 0.0;           // pinned from the steady-state solver
    double delta_n = 0.0;        // fitted amplitude
    double horizon = 0.0;
    int n_traj = 0;
    std::vector<double> times;   // ensemble-mean curve for inspection
    std::vector<double> n_mean;
};

// Ensemble metastable-decay measurement: n(t) averaged over trajectories
// fitted to n_ss + delta_n exp(-lambda t) with n_ss pinned. Throws
// DegenerateInputError when the pilot shows no decay separation.
DecayResult decay_experiment(const ModelParams& reduced, InitialState init,
                             const DecayOptions& opts);

struct PrepareBrightOptions {
    // defaults follow the hardware protocol at the reference scale; desk
    // runs pass their own values
    double delta_start = -kTwoPi * 0.3e6;   // rad/s
    double drive_strong = kTwoPi * 135e3;   // rad/s
    double ramp_rate = kTwoPi * 1e6 / 1e-3; // rad/s per s
    double settle = 0.0;                    // hold after the drive drop
    double dt = 0.0;
    int cutoff = 24;
};

// Four-step bright-state preparation: strong drive at large negative
// detuning, ramp to the target detuning, abrupt drive drop, brief settle.
// Throws DegenerateInputError when the resulting population is below three
// times the vacuum-regime level (no bright branch at the target).
CVec prepare_bright(const ModelParams& target, const PrepareBrightOptions& opts,
                    std::uint64_t seed);

struct HysteresisOptions {
    double delta_min = 0.0;  // rad/s at scale 1 (reduced)
    double delta_max = 0.0;
    double sweep_time = 0.0;   // T; rate D = (delta_max - delta_min)/T
    int n_reps = 100;
    double dwell = 0.0;        // 0: sweep_time / 200 steps
    double dt = 0.0;
    int cutoff = 24;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct HysteresisResult {
    std::vector<double> delta;   // common grid
    std::vector<double> n_up;
    std::vector<double> n_down;
    double area = 0.0;           // Eq.-(5)-style time-normalized loop area
    double sweep_time = 0.0;
    bool interpolated = false;   // curves came on mismatched grids
};

HysteresisResult hysteresis(const ModelParams& reduced, const HysteresisOptions& opts);

// Area from externally supplied curves; mismatched grids are interpolated
// onto their common support with the flag raised.
HysteresisResult hysteresis_area(std::span<const double> delta_up,
                                 std::span<const double> n_up,
                                 std::span<const double> delta_down,
                                 std::span<const double> n_down,
                                 double sweep_time);

struct AreaScalingResult {
    std::vector<double> sweep_times;
    std::vector<double> areas;
    std::vector<bool> dropped;    // non-positive area, excluded from the fit
    double exponent = 0.0;        // A(T) ~ T^x
    double exponent_stderr = 0.0;
    double r_squared = 0.0;
};

// Power-law fit of the hysteresis area over >= 4 sweep times spanning at
// least one decade.
AreaScalingResult area_scaling(const ModelParams& reduced,
                               std::span<const double> sweep_times,
                               const HysteresisOptions& base);

struct ScanPoint {
    double delta_tilde = 0.0;
    double scale = 1.0;
    int cutoff = 0;
    double n_ss = 0.0;
    double n_tilde = 0.0;
    double squeeze_min = 0.0;
    double squeeze_phi = 0.0;
    double binder = 0.0;
    double a_abs = 0.0;       // |<a>|, weak-symmetry check
    double dn_ddelta = 0.0;   // finite differences over the grid
    double d2n_ddelta2 = 0.0;
    bool failed = false;
    std::string error;
};

struct ScanOptions {
    int fixed_cutoff = 0;     // 0: converge per point at 1%
    double cutoff_rel_tol = 0.01;
    int max_cutoff = 122;
    int binder_bins = 90;
    int workers = 1;
};

// Steady-state phase-diagram scan over reduced detuning and the L ladder.
// Solver failures are recorded per point and the scan continues.
std::vector<ScanPoint> phase_diagram_scan(const ModelParams& reduced,
                                          std::span<const double> delta_grid,
                                          std::span<const double> scales,
                                          const ScanOptions& opts = {});

// Detuning of the maximum first derivative of n(delta): the critical-point
// estimator used for the first-order studies.
double critical_detuning(std::span<const double> delta, std::span<const double> n);

struct GapScalingPoint {
    double scale = 0.0;
    double min_gap = 0.0;
    double delta_at_min = 0.0;
};

struct GapScalingResult {
    std::vector<GapScalingPoint> ssb;
    std::vector<GapScalingPoint> first;
    double alpha_ssb = 0.0;   // min gap ~ exp(alpha L)
    double alpha_1st = 0.0;
    double r2_ssb = 0.0;
    double r2_1st = 0.0;
    bool monotone_ssb = true;
    bool monotone_1st = true;
};

struct GapScanGrids {
    std::vector<double> delta_ssb;   // reduced detunings scanned per L
    std::vector<double> delta_1st;
    int cutoff = 32;
    int workers = 1;
};

// Exponential fits of the minimum-over-detuning gaps against the scaling
// parameter; non-monotone minima only clear the flags, the fit is still
// produced.
GapScalingResult gap_scaling(const ModelParams& reduced,
                             std::span<const double> scales,
                             const GapScanGrids& grids);

struct TransientPoint {
    double delta_tilde = 0.0;
    double n_measured = 0.0;
    double n_ss = 0.0;
};

struct TransientResult {
    double delay = 0.0;
    std::vector<TransientPoint> points;
};

// Deterministic down-sweep with a per-point wait: for short delays the
// measured population lags n_ss, for long delays it converges to it.
std::vector<TransientResult> transient_study(const ModelParams& reduced,
                                             std::span<const double> delta_grid_desc,
                                             std::span<const double> delays,
                                             int cutoff = 24);

}  // namespace dpt
