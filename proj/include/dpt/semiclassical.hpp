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

#include <optional>
#include <span>
#include <vector>

#include "dpt/model.hpp"
#include "dpt/types.hpp"

namespace dpt {

// Mean-field steady photon number
//   n = [delta - sqrt(|G|^2 - (kappa + kappa_phi)^2)] / sqrt(U^2 + kappa_2^2)
// clamped at zero; returns the vacuum branch (0) when the square root is
// imaginary. The minus branch with unhalved damping is the default; both
// variants are exposed because the branch sign is ambiguous in the bright
// regime and the coherent-state equation of motion carries (kappa +
// kappa_phi)/2. The quantum solver is the arbiter between them.
double meanfield_nss(const ModelParams& params, bool plus_branch = false,
                     bool half_damping = false);

struct MeanfieldFixedPoint {
    Complex alpha;
    bool stable = false;
};

struct MeanfieldOptions {
    bool include_kappa_two = true;
    double blowup_photons = 1e6;  // |alpha|^2 beyond this aborts integration
};

struct MeanfieldTrace {
    std::vector<double> times;
    std::vector<Complex> alpha;
    std::vector<MeanfieldFixedPoint> fixed_points;
};

// Coherent-state equation of motion
//   d alpha/dt = -i (delta + U |alpha|^2) alpha - i G conj(alpha)
//                - (kappa + kappa_phi)/2 alpha - kappa_2 |alpha|^2 alpha,
// integrated from alpha0; fixed points located by damped Newton iterations
// from a ring of starts and classified by the 2x2 real Jacobian.
MeanfieldTrace meanfield_ode(const ModelParams& params, Complex alpha0,
                             double horizon, const MeanfieldOptions& opts = {});

// All real non-negative roots n of the scale-invariant Duffing cubic
//   (delta^2 + 1/4) n - 2 delta xi n^2 + xi^2 n^3 = 1/2.
// The root count is 1 or 3.
std::vector<double> duffing_response(double delta, double xi);

struct EnvironmentCorrection {
    double amplitude = 1.0;  // a
    double phase = 0.0;      // alpha (radians)
    double delay = 0.0;      // tau (seconds)
    double mismatch = 0.0;   // impedance-mismatch angle phi
};

struct ScatteringParams {
    double omega_r = 0.0;     // rad/s
    double kappa_ext = 0.0;   // rad/s
    double kappa_int = 0.0;   // rad/s
    EnvironmentCorrection env;
};

// Transmission coefficient of Eq.-style input-output response at angular
// frequency omega, with the intracavity scale-invariant population n
// (0 for the linear response). Values use the electrical-engineering
// imaginary unit mapped as j = -i onto std::complex.
Complex s21(double omega, const ScatteringParams& sp, double xi = 0.0,
            double n_scale_invariant = 0.0);

enum class SweepDirection { kUp, kDown };

// Frequency sweep with Duffing branch selection by continuity; at fold
// points the response jumps to the nearest remaining root, so up and down
// sweeps trace different branches in the bistable window.
std::vector<Complex> s21_sweep(std::span<const double> omegas,
                               const ScatteringParams& sp, double xi,
                               SweepDirection direction = SweepDirection::kUp);

struct S21FitResult {
    ScatteringParams params;
    double xi = 0.0;
    double chi2 = 0.0;
    bool converged = false;
};

// Least-squares fit of (kappa_ext, kappa_int, omega_r, env, xi) to a
// measured complex S21 trace. xi is held fixed unless fit_xi is set.
S21FitResult s21_fit(std::span<const double> omegas,
                     std::span<const Complex> values,
                     const ScatteringParams& initial, double xi_init = 0.0,
                     bool fit_xi = false);

struct CircuitParams {
    double gamma0 = 0.0;        // zero-flux L_J / L_cav
    double omega_quarter = 0.0; // bare lambda/4 frequency (rad/s)
    double cap_ratio = 0.0;     // C_J / C_cav
    double flux = 0.0;          // F = phi_ext / phi_0
    std::optional<double> l_cav;  // total cavity inductance (H)
};

// Total cavity inductance of a quarter-wave line with characteristic
// impedance z0 and bare resonance omega_quarter.
double cavity_inductance(double z0, double omega_quarter);

struct CircuitModes {
    double k0d = 0.0;              // fundamental root in (0, pi/2)
    double omega0 = 0.0;           // rad/s
    double k0d_first_order = 0.0;  // (pi/2)/(1+gamma) small-gamma form
    double omega0_first_order = 0.0;
    double gamma_eff = 0.0;        // gamma0 / |cos F|
};

// Fundamental mode of the SQUID-terminated line: root of
//   kd tan(kd) = 1/gamma(F) - (C_J/C_cav) (kd)^2  on (0, pi/2).
CircuitModes circuit_modes(const CircuitParams& circuit);

// Kerr nonlinearity (rad/s, negative) from the fundamental mode solution;
// requires l_cav. |U| is what enters the rotating-frame model.
double kerr_from_circuit(const CircuitParams& circuit);

struct FluxPoint {
    double flux = 0.0;
    double omega_r = 0.0;
    bool degenerate = false;  // |cos F| too small, omega_r not computed
};
std::vector<FluxPoint> flux_tuning(const CircuitParams& circuit,
                                   std::span<const double> flux_values);

struct FluxFitResult {
    double gamma0 = 0.0;
    double omega_quarter = 0.0;
    bool converged = false;
};

// Recovers (gamma0, omega_quarter) from a measured omega_r(F) curve.
FluxFitResult fit_flux_curve(std::span<const FluxPoint> points,
                             const CircuitParams& initial);

}  // namespace dpt
