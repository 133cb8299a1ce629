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
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dpt/fock.hpp"
#include "dpt/model.hpp"
#include "dpt/types.hpp"

namespace dpt {

// Amplification-chain model: linear power gain, added noise quanta per unit
// bandwidth, and the external coupling that scales cavity amplitudes into
// the output line. Configs accept the gain in dB.
struct MeasurementChain {
    double gain = 1.0;       // linear power gain, >= 1
    double noise_n = 0.0;    // added noise quanta, >= 0
    double kappa_ext = 0.0;  // rad/s, <= model kappa
};

// Demodulated quadrature record. Cavity-frame records store the window
// means of <I> = Re<a> and <Q> = Im<a> (vacuum variance of each quadrature
// operator is 1/4 under I = (a^dag + a)/2, Q = i(a^dag - a)/2); measured
// records additionally carry gain/noise scaling from the chain model.
//
// het_noise holds the integrated heterodyne projection noise per window
// (cavity-amplitude units), kept separate so the signal columns stay
// noise-free; the chain model folds it in when building measured records.
struct TrajectoryRecord {
    std::vector<double> times;   // window centers, uniform spacing tau_int + tau_delay
    std::vector<double> i_vals;
    std::vector<double> q_vals;
    std::vector<double> n_vals;  // window means of <n>, filled by the simulator
    std::vector<Complex> het_noise;
    double het_noise_var = 0.0;  // per-window variance of het_noise entries
    double tau_int = 0.0;        // effective (rounded to the step grid)
    double tau_delay = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t params_hash = 0;
    std::optional<MeasurementChain> chain;
    double chain_noise_var = 0.0;  // total added noise per window in output units
    bool finite() const;
};

struct TrajectoryOptions {
    double tau_int = 0.0;    // window length; default 20 dt
    double tau_delay = 0.0;  // idle gap between windows
    // Monitored one-photon loss rate feeding the record; <= kappa. Zero
    // selects full monitoring of the loss channel (kappa); the thermal,
    // dephasing and two-photon channels are always unmonitored jumps.
    double kappa_monitored = 0.0;
};

// Single diffusive (heterodyne) unraveling of the monitored loss channel
// combined with jump unraveling of the unmonitored channels, integrated at
// fixed step dt with per-step renormalization. Bit-reproducible from
// (params, psi0, duration, dt, seed).
TrajectoryRecord simulate_trajectory(const ModelParams& params, const CVec& psi0,
                                     double duration, double dt, std::uint64_t seed,
                                     const TrajectoryOptions& opts = {});

class CounterRng;

// Fixed-step engine behind simulate_trajectory, exposed for protocols that
// ramp (delta, drive) piecewise-constantly between steps. One step applies
// the deterministic RK4 drift, the heterodyne diffusion of the monitored
// channel and the jump test, then renormalizes.
class StochasticStepper {
public:
    StochasticStepper(const ModelParams& params, int dim,
                      const TrajectoryOptions& opts = {});
    ~StochasticStepper();
    StochasticStepper(StochasticStepper&&) noexcept;
    StochasticStepper& operator=(StochasticStepper&&) noexcept;

    // swap in new Hamiltonian coefficients; dissipators are unchanged
    void set_ramp(double delta, double drive);

    // advances psi by dt; returns the heterodyne noise increment d xi
    // consumed by this step (zero-mean complex, variance dt)
    Complex step(CVec& psi, double dt, CounterRng& rng);

    const FockOperators& ops() const;
    double kappa_monitored() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Applies the chain: output s_k = sqrt(gain) [ sqrt(kappa_ext tau_int / 2)
// (alpha_k + w_k) + nu_k ] with alpha_k = I_k + i Q_k, w_k the record's own
// heterodyne noise column (when present), and nu_k circular Gaussian with
// E|nu|^2 = (1 - 1/gain)(noise_n + 1). De-noised averages match the input
// record. The closed-form total noise variance is stored on the result.
TrajectoryRecord apply_measurement_chain(const TrajectoryRecord& record,
                                         const MeasurementChain& chain,
                                         std::uint64_t seed);

struct AutocorrelationOptions {
    double transient = 0.0;    // time discarded from the head of the record
    int min_pairs = 100;       // fewest admissible pairs at max_lag
};

// Normalized single-record estimator C(t_k) = <I(tau) I(tau + t_k)>_tau /
// <I(tau)^2>_tau with C(0) = 1 exactly. Requires record length >= 10 max_lag.
struct Autocorrelation {
    std::vector<double> lags;  // in record time units
    std::vector<double> values;
};
Autocorrelation autocorrelation(const TrajectoryRecord& record, int max_lag,
                                const AutocorrelationOptions& opts = {});

struct ExponentialFit {
    double rate = 0.0;
    double ci_low = 0.0;   // 95% bootstrap interval
    double ci_high = 0.0;
    double amplitude = 0.0;
    int window_points = 0;
};

// Least squares of log C vs t over the window where the series exceeds 0.05,
// with a 200-resample residual bootstrap for the confidence interval.
ExponentialFit fit_exponential(std::span<const double> series,
                               std::span<const double> times,
                               double floor = 0.05, std::uint64_t seed = 1);

struct PhaseStatistics {
    std::vector<double> phases;        // per-window Phi = arg(I + iQ)
    std::vector<double> bin_centers;   // histogram over (-pi, pi]
    std::vector<double> density;       // normalized to unit mass
    double binder = 0.0;
};
PhaseStatistics phase_statistics(const TrajectoryRecord& record, int bins = 64);

struct PhotonEstimate {
    double value = 0.0;
    bool clamped = false;  // noise subtraction went below zero
};

// n estimate <I^2 + Q^2> with the chain noise contribution subtracted for
// measured-frame records.
PhotonEstimate reconstruct_photon_number(const TrajectoryRecord& record);

}  // namespace dpt
