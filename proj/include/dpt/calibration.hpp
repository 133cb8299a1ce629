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
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dpt/trajectories.hpp"
#include "dpt/types.hpp"

namespace dpt {

// Thermal-emission sweep for gain/noise calibration.
struct PlanckDataset {
    std::vector<double> temperatures;  // K, > 0
    std::vector<double> powers;        // W measured in `bandwidth`, > 0
    double bandwidth = 0.0;            // Hz
    double frequency = 0.0;            // Hz
};

struct PlanckFitResult {
    double gain = 0.0;      // linear power gain
    double gain_db = 0.0;
    double noise_n = 0.0;   // added quanta
    double gain_stderr = 0.0;
    double noise_stderr = 0.0;
};

// Fit of P = B G h f [coth(h f / 2 k_B T)/2 + n]; linear in (G, G n).
// Needs >= 6 points reaching into the coth curvature region
// (k_B T_min <~ 2 h f), otherwise gain and noise are not separable.
PlanckFitResult planck_fit(const PlanckDataset& data);

struct AttenuationFitResult {
    double attenuation = 0.0;  // linear power ratio
    double attenuation_db = 0.0;
    double intercept = 0.0;    // W; expected G B h f n
};

// Linear fit of P_m = G [A P_d + B h f n] over drive powers.
AttenuationFitResult attenuation_fit(std::span<const double> drive_powers,
                                     std::span<const double> measured_powers,
                                     double gain, double noise_n,
                                     double bandwidth, double frequency);

struct MomentEntry {
    Complex value{0.0, 0.0};
    double stderr = 0.0;
};

// Table of moments indexed by (i, j). Depending on the stage it holds
// <(S^dag)^i S^j>, anti-normal noise moments <h^i (h^dag)^j>, output
// moments <(b^dag)^i b^j> or cavity moments <(a^dag)^i a^j>.
class MomentTable {
public:
    MomentTable() = default;
    explicit MomentTable(int max_order) : max_order_(max_order) {}

    int max_order() const { return max_order_; }
    const MomentEntry& at(int i, int j) const;
    MomentEntry& entry(int i, int j);
    bool has(int i, int j) const;

    // max |entry(i,j) - conj(entry(j,i))| over stored pairs
    double hermitian_pairing_error() const;

private:
    int max_order_ = 0;
    std::map<std::pair<int, int>, MomentEntry> entries_;
};

struct NoiseDiagnostics {
    Complex third_moment{0.0, 0.0};        // <s^2 conj(s)>
    Complex third_moment_pure{0.0, 0.0};   // <s^3>
    double fourth_cumulant = 0.0;          // <|s|^4> - 2<|s|^2>^2 - |<s^2>|^2
    double third_stderr = 0.0;
    double fourth_stderr = 0.0;
};

struct NoiseReference {
    MomentTable moments;  // anti-normal ordered <h^n (h^dag)^m>
    NoiseDiagnostics diagnostics;
};

// Estimates the anti-normal noise moments from envelope samples taken with
// the cavity output in vacuum. Requires at least 10^(3 + max_order)
// samples.
NoiseReference noise_reference(std::span<const Complex> samples, int max_order);

// Solves the triangular binomial system for normal-ordered output moments
// given the signal samples and the calibrated noise table, propagating
// statistical errors to first order.
MomentTable reconstruct_output_moments(std::span<const Complex> samples,
                                       const MomentTable& noise, int max_order);

// <a^dag k a^l> = (kappa_ext/2)^(-(k+l)/2) <(b^dag)^k b^l> for vacuum input.
MomentTable cavity_moments(const MomentTable& output, double kappa_ext);

struct MomentSqueezing {
    double variance = 0.0;  // minimal quadrature variance, vacuum = 1/2
    double phi = 0.0;
    double stderr = 0.0;
};
MomentSqueezing squeezing_from_moments(const MomentTable& cavity);

// Second moments defining a Gaussian state of the output mode.
struct GaussianStateSpec {
    Complex mean{0.0, 0.0};   // <b>
    double occupation = 0.0;  // <b^dag b>
    Complex anomalous{0.0, 0.0};  // <b^2>
};

// Draws classical envelope samples s = beta + nu whose moments reproduce
// the reference-method statistics: beta carries the normal-ordered state
// covariance, nu the anti-normal chain noise (noise_n + 1 per complex
// sample). The chain's high-gain limit is assumed; gain rescaling is left
// to the caller. Used as the synthetic oracle for the reconstruction
// pipeline and by the calibrate task.
std::vector<Complex> sample_envelope_stream(const GaussianStateSpec& state,
                                            double noise_n, std::size_t count,
                                            std::uint64_t seed);

// Envelope samples of a measured-frame trajectory record, de-scaled by
// sqrt(gain * tau_int) so the cavity formula applies verbatim.
std::vector<Complex> samples_from_record(const TrajectoryRecord& record);

}  // namespace dpt
