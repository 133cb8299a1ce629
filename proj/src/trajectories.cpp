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

#include "dpt/trajectories.hpp"

#include <algorithm>
#include <cmath>

#include "dpt/errors.hpp"
#include "dpt/fitting.hpp"
#include "dpt/liouvillian.hpp"
#include "dpt/rng.hpp"
#include "dpt/steadystate.hpp"

namespace dpt {

bool TrajectoryRecord::finite() const {
    auto all_finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(),
                           [](double x) { return std::isfinite(x); });
    };
    return all_finite(times) && all_finite(i_vals) && all_finite(q_vals) &&
           all_finite(n_vals);
}

struct StochasticStepper::Impl {
    FockOperators ops;
    ModelParams params;
    SpMat monitored;       // sqrt(kappa_mon) a
    SpMat decay_half;      // (M^dag M + sum_k J^dag J)/2, Hamiltonian-free
    SpMat drift_const;     // -iH - decay_half
    SpMat jump_sum;        // sum_k J_k^dag J_k
    std::vector<SpMat> jumps;
    double kappa_mon = 0.0;

    // Nonlinear drift of the hybrid unraveling. The scalar term only
    // balances the norm (the ray is unaffected), which keeps the
    // deterministic RK4 step norm-conserving to O(dt^2) so norm drift is a
    // usable step-size guard:
    //   f(psi) = [drift_const + <M>^* M
    //             + (<M^dag M>/2 + <sum J^dag J>/2 - |<M>|^2)] psi.
    CVec drift(const CVec& psi) const {
        CVec m_psi = monitored * psi;
        const Complex m_expect = psi.dot(m_psi);
        const double mdagm = m_psi.squaredNorm();
        const double jump_weight = psi.dot(jump_sum * psi).real();
        CVec out = drift_const * psi;
        out += std::conj(m_expect) * m_psi;
        out += (0.5 * (mdagm + jump_weight) - std::norm(m_expect)) * psi;
        return out;
    }
};

StochasticStepper::StochasticStepper(const ModelParams& params, int dim,
                                     const TrajectoryOptions& opts)
    : impl_(std::make_unique<Impl>()) {
    if (!params.valid()) {
        throw InvalidArgumentError("model parameters violate their invariants");
    }
    if (dim < 2) {
        throw InvalidArgumentError("stepper needs at least 2 Fock levels");
    }
    Impl& m = *impl_;
    m.ops = build_fock_operators(dim);
    m.params = params;
    m.kappa_mon = opts.kappa_monitored > 0.0 ? opts.kappa_monitored : params.kappa;
    if (m.kappa_mon > params.kappa * (1.0 + 1e-12)) {
        throw InvalidArgumentError("monitored rate exceeds the loss rate kappa");
    }
    m.monitored = std::sqrt(m.kappa_mon) * m.ops.a;

    // unmonitored one-photon loss remainder, thermal excitation, dephasing,
    // two-photon loss: all treated as jump channels
    const double kappa_rest = params.kappa * (params.n_th + 1.0) - m.kappa_mon;
    if (kappa_rest > 1e-15 * params.kappa) {
        m.jumps.push_back(SpMat(std::sqrt(kappa_rest) * m.ops.a));
    }
    if (params.kappa * params.n_th > 0.0) {
        m.jumps.push_back(SpMat(std::sqrt(params.kappa * params.n_th) * m.ops.a_dag));
    }
    if (params.kappa_phi > 0.0) {
        m.jumps.push_back(SpMat(std::sqrt(params.kappa_phi) * m.ops.number));
    }
    if (params.kappa_two > 0.0) {
        m.jumps.push_back(SpMat(std::sqrt(params.kappa_two) * SpMat(m.ops.a * m.ops.a)));
    }

    m.jump_sum = SpMat(dim, dim);
    for (const SpMat& j : m.jumps) {
        m.jump_sum += SpMat(j.adjoint() * j);
    }
    m.decay_half = 0.5 * SpMat(m.monitored.adjoint() * m.monitored) + 0.5 * m.jump_sum;
    m.drift_const = -kImag * build_hamiltonian(params, m.ops) - m.decay_half;
    m.drift_const.makeCompressed();
}

StochasticStepper::~StochasticStepper() = default;
StochasticStepper::StochasticStepper(StochasticStepper&&) noexcept = default;
StochasticStepper& StochasticStepper::operator=(StochasticStepper&&) noexcept = default;

void StochasticStepper::set_ramp(double delta, double drive) {
    Impl& m = *impl_;
    m.params.delta = delta;
    m.params.drive = drive;
    m.drift_const = -kImag * build_hamiltonian(m.params, m.ops) - m.decay_half;
    m.drift_const.makeCompressed();
}

const FockOperators& StochasticStepper::ops() const { return impl_->ops; }
double StochasticStepper::kappa_monitored() const { return impl_->kappa_mon; }

Complex StochasticStepper::step(CVec& psi, double dt, CounterRng& rng) {
    Impl& m = *impl_;
    // jump probabilities from the pre-step state
    double p_total = 0.0;
    double p_channel[8];
    for (std::size_t c = 0; c < m.jumps.size(); ++c) {
        const double pj = dt * (m.jumps[c] * psi).squaredNorm();
        p_channel[c] = pj;
        p_total += pj;
    }
    const Complex dxi = std::sqrt(dt) * rng.complex_normal();
    const double u = rng.uniform();

    if (u < p_total) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m.jumps.size(); ++c) {
            acc += p_channel[c];
            if (u < acc) {
                psi = m.jumps[c] * psi;
                break;
            }
        }
        const double norm = psi.norm();
        if (norm < 1e-300) {
            throw SolverError("jump annihilated the state; cutoff too small");
        }
        psi /= norm;
        return dxi;
    }

    // deterministic RK4 drift, then Euler diffusion from the pre-step
    // state, then renormalization
    CVec m_psi = m.monitored * psi;
    const Complex m_expect = psi.dot(m_psi);

    CVec k1 = m.drift(psi);
    CVec k2 = m.drift(psi + (0.5 * dt) * k1);
    CVec k3 = m.drift(psi + (0.5 * dt) * k2);
    CVec k4 = m.drift(psi + dt * k3);
    CVec psi_det = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double det_norm = psi_det.norm();
    if (std::abs(det_norm - 1.0) > 1e-4) {
        throw SolverError("deterministic drift norm drifted by " +
                          std::to_string(det_norm - 1.0) +
                          "; reduce dt or raise the cutoff");
    }
    psi_det += dxi * (m_psi - m_expect * psi);
    psi = psi_det / psi_det.norm();
    return dxi;
}

TrajectoryRecord simulate_trajectory(const ModelParams& params, const CVec& psi0,
                                     double duration, double dt, std::uint64_t seed,
                                     const TrajectoryOptions& opts) {
    const int dim = static_cast<int>(psi0.size());
    if (dim < 2) {
        throw InvalidArgumentError("initial state needs at least 2 Fock levels");
    }
    if (dt <= 0.0 || duration < 10.0 * dt) {
        throw InvalidArgumentError("duration must cover at least 10 steps");
    }

    StochasticStepper stepper(params, dim, opts);
    const FockOperators& ops = stepper.ops();

    // step-size precondition: dt <= 0.02 / max(kappa, |delta|, G, U n_est)
    {
        CVec n_psi = ops.number * psi0;
        const double n_est = std::max(psi0.dot(n_psi).real(), 1.0);
        const double fastest = std::max({params.kappa, std::abs(params.delta),
                                         params.drive, std::abs(params.kerr) * n_est});
        if (fastest > 0.0 && dt > 0.02 / fastest + 1e-15) {
            throw InvalidArgumentError("dt violates the step-size precondition "
                                       "dt <= 0.02/max(kappa, |delta|, G, U n)");
        }
    }

    const double tau_int_req = opts.tau_int > 0.0 ? opts.tau_int : 20.0 * dt;
    const int acq_steps = std::max(1, int(std::llround(tau_int_req / dt)));
    const int delay_steps = std::max(0, int(std::llround(opts.tau_delay / dt)));
    const double tau_int = acq_steps * dt;
    const double tau_delay = delay_steps * dt;
    const int window_steps = acq_steps + delay_steps;
    const auto n_windows =
        static_cast<std::size_t>(duration / (window_steps * dt));
    if (n_windows == 0) {
        throw InvalidArgumentError("duration shorter than one acquisition window");
    }

    TrajectoryRecord rec;
    rec.tau_int = tau_int;
    rec.tau_delay = tau_delay;
    rec.dt = dt;
    rec.seed = seed;
    rec.params_hash = params.hash();
    rec.het_noise_var = 1.0 / (stepper.kappa_monitored() * tau_int);
    rec.times.reserve(n_windows);
    rec.i_vals.reserve(n_windows);
    rec.q_vals.reserve(n_windows);
    rec.n_vals.reserve(n_windows);
    rec.het_noise.reserve(n_windows);

    CounterRng rng(seed, params.hash());
    CVec psi = psi0.normalized();
    const double noise_scale = 1.0 / (std::sqrt(stepper.kappa_monitored()) * tau_int);

    for (std::size_t w = 0; w < n_windows; ++w) {
        Complex acc_a = 0.0;
        double acc_n = 0.0;
        Complex acc_noise = 0.0;
        for (int s = 0; s < window_steps; ++s) {
            const Complex dxi = stepper.step(psi, dt, rng);
            if (s < acq_steps) {
                acc_a += psi.dot(ops.a * psi);
                acc_n += psi.dot(ops.number * psi).real();
                acc_noise += std::conj(dxi);
            }
        }
        const Complex a_mean = acc_a / double(acq_steps);
        rec.times.push_back((double(w) * window_steps + 0.5 * acq_steps) * dt);
        rec.i_vals.push_back(a_mean.real());
        rec.q_vals.push_back(a_mean.imag());
        rec.n_vals.push_back(acc_n / double(acq_steps));
        rec.het_noise.push_back(acc_noise * noise_scale);
    }
    if (!rec.finite()) {
        throw SolverError("trajectory produced non-finite record values");
    }
    return rec;
}

TrajectoryRecord apply_measurement_chain(const TrajectoryRecord& record,
                                         const MeasurementChain& chain,
                                         std::uint64_t seed) {
    if (chain.gain < 1.0 || chain.noise_n < 0.0 || chain.kappa_ext <= 0.0) {
        throw InvalidArgumentError("chain needs gain >= 1, noise_n >= 0, kappa_ext > 0");
    }
    if (record.tau_int <= 0.0) {
        throw InvalidArgumentError("record lacks an integration window");
    }
    TrajectoryRecord out;
    out.times = record.times;
    out.tau_int = record.tau_int;
    out.tau_delay = record.tau_delay;
    out.dt = record.dt;
    out.seed = seed;
    out.params_hash = record.params_hash;
    out.chain = chain;

    const double scale = std::sqrt(chain.kappa_ext * record.tau_int / 2.0);
    const double amp = std::sqrt(chain.gain);
    const double nu_var = (1.0 - 1.0 / chain.gain) * (chain.noise_n + 1.0);
    const bool has_het = record.het_noise.size() == record.i_vals.size();

    // total per-window complex noise variance in output units
    out.chain_noise_var =
        chain.gain * (nu_var + (has_het ? scale * scale * record.het_noise_var : 0.0));

    CounterRng rng(seed, record.params_hash ^ 0xc4a1u);
    out.i_vals.resize(record.i_vals.size());
    out.q_vals.resize(record.q_vals.size());
    for (std::size_t k = 0; k < record.i_vals.size(); ++k) {
        Complex alpha(record.i_vals[k], record.q_vals[k]);
        if (has_het) {
            alpha += record.het_noise[k];
        }
        const Complex nu = std::sqrt(nu_var) * rng.complex_normal();
        const Complex s = amp * (scale * alpha + nu);
        out.i_vals[k] = s.real();
        out.q_vals[k] = s.imag();
    }
    return out;
}

Autocorrelation autocorrelation(const TrajectoryRecord& record, int max_lag,
                                const AutocorrelationOptions& opts) {
    if (max_lag < 1) {
        throw InvalidArgumentError("max_lag must be positive");
    }
    const double spacing = record.tau_int + record.tau_delay;
    std::size_t start = 0;
    if (opts.transient > 0.0) {
        start = static_cast<std::size_t>(opts.transient / spacing);
    }
    if (start >= record.i_vals.size()) {
        throw InsufficientDataError("transient discards the whole record");
    }
    const std::size_t n = record.i_vals.size() - start;
    if (n < static_cast<std::size_t>(10 * max_lag)) {
        throw InsufficientDataError("record holds " + std::to_string(n) +
                                    " samples; need >= 10 x max_lag");
    }
    if (n - max_lag < static_cast<std::size_t>(opts.min_pairs)) {
        throw InsufficientDataError("fewer than " + std::to_string(opts.min_pairs) +
                                    " pairs at max_lag");
    }
    const double* x = record.i_vals.data() + start;

    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        denom += x[i] * x[i];
    }
    denom /= double(n);
    if (denom <= 0.0) {
        throw DegenerateInputError("record quadrature is identically zero");
    }

    Autocorrelation out;
    out.lags.reserve(max_lag + 1);
    out.values.reserve(max_lag + 1);
    for (int lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        const std::size_t pairs = n - lag;
        for (std::size_t i = 0; i < pairs; ++i) {
            acc += x[i] * x[i + lag];
        }
        out.lags.push_back(lag * spacing);
        out.values.push_back(acc / double(pairs) / denom);
    }
    out.values[0] = 1.0;  // exact by normalization
    return out;
}

ExponentialFit fit_exponential(std::span<const double> series,
                               std::span<const double> times,
                               double floor, std::uint64_t seed) {
    if (series.size() != times.size()) {
        throw InvalidArgumentError("series and times must match");
    }
    // window: contiguous prefix with values above the floor
    std::size_t window = 0;
    while (window < series.size() && series[window] > floor) {
        ++window;
    }
    if (window < 5) {
        throw InsufficientDataError("fit window holds fewer than 5 points");
    }
    const double w_max = *std::max_element(series.begin(), series.begin() + window);
    const double w_min = *std::min_element(series.begin(), series.begin() + window);
    if (w_max - w_min < 0.05 * std::abs(w_max)) {
        throw DegenerateInputError("series shows no decay over the fit window");
    }

    std::vector<double> log_y(window), t(window);
    for (std::size_t i = 0; i < window; ++i) {
        log_y[i] = std::log(series[i]);
        t[i] = times[i];
    }
    LinearFit fit = linear_least_squares(t, log_y);

    ExponentialFit out;
    out.rate = -fit.slope;
    out.amplitude = std::exp(fit.intercept);
    out.window_points = static_cast<int>(window);

    // residual bootstrap, 200 resamples
    std::vector<double> resid(window);
    for (std::size_t i = 0; i < window; ++i) {
        resid[i] = log_y[i] - (fit.intercept + fit.slope * t[i]);
    }
    CounterRng rng(seed, 0xb007u);
    std::vector<double> rates;
    rates.reserve(200);
    std::vector<double> resampled(window);
    for (int b = 0; b < 200; ++b) {
        for (std::size_t i = 0; i < window; ++i) {
            const auto pick = static_cast<std::size_t>(rng.uniform() * window);
            resampled[i] = fit.intercept + fit.slope * t[i] +
                           resid[std::min(pick, window - 1)];
        }
        LinearFit refit = linear_least_squares(t, resampled);
        rates.push_back(-refit.slope);
    }
    std::sort(rates.begin(), rates.end());
    out.ci_low = rates[4];    // 2.5th percentile of 200
    out.ci_high = rates[194];
    return out;
}

PhaseStatistics phase_statistics(const TrajectoryRecord& record, int bins) {
    if (bins < 2) {
        throw InvalidArgumentError("need at least 2 histogram bins");
    }
    if (record.i_vals.empty()) {
        throw InsufficientDataError("empty record");
    }
    double max_amp = 0.0;
    PhaseStatistics stats;
    stats.phases.reserve(record.i_vals.size());
    for (std::size_t k = 0; k < record.i_vals.size(); ++k) {
        const double amp = std::hypot(record.i_vals[k], record.q_vals[k]);
        max_amp = std::max(max_amp, amp);
        stats.phases.push_back(std::atan2(record.q_vals[k], record.i_vals[k]));
    }
    if (max_amp == 0.0) {
        throw DegenerateInputError("phase undefined: record is identically zero");
    }

    stats.bin_centers.resize(bins);
    stats.density.assign(bins, 0.0);
    const double width = kTwoPi / bins;
    for (int b = 0; b < bins; ++b) {
        stats.bin_centers[b] = -kPi + width * (b + 0.5);
    }
    for (double phi : stats.phases) {
        int b = int((phi + kPi) / width);
        b = std::clamp(b, 0, bins - 1);
        stats.density[b] += 1.0;
    }
    const double mass = double(stats.phases.size()) * width;
    for (double& d : stats.density) {
        d /= mass;
    }
    try {
        stats.binder = binder_cumulant(stats.phases);
    } catch (const Error&) {
        // undefined for degenerate (all-zero phase) or short records;
        // the histogram is still meaningful
        stats.binder = std::numeric_limits<double>::quiet_NaN();
    }
    return stats;
}

PhotonEstimate reconstruct_photon_number(const TrajectoryRecord& record) {
    if (record.i_vals.empty()) {
        throw InsufficientDataError("empty record");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < record.i_vals.size(); ++k) {
        acc += record.i_vals[k] * record.i_vals[k] +
               record.q_vals[k] * record.q_vals[k];
    }
    acc /= double(record.i_vals.size());

    PhotonEstimate est;
    if (record.chain) {
        const double scale2 =
            record.chain->gain * record.chain->kappa_ext * record.tau_int / 2.0;
        const double n_raw = (acc - record.chain_noise_var) / scale2;
        est.value = std::max(n_raw, 0.0);
        est.clamped = n_raw < 0.0;
    } else {
        est.value = acc;
    }
    return est;
}

}  // namespace dpt
