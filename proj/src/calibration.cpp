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

#include "dpt/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "dpt/constants.hpp"
#include "dpt/errors.hpp"
#include "dpt/fitting.hpp"
#include "dpt/rng.hpp"

namespace dpt {

PlanckFitResult planck_fit(const PlanckDataset& data) {
    const std::size_t n = data.temperatures.size();
    if (n < 6 || data.powers.size() != n) {
        throw InsufficientDataError("Planck fit needs >= 6 matched (T, P) points");
    }
    if (data.bandwidth <= 0.0 || data.frequency <= 0.0) {
        throw InvalidArgumentError("Planck fit needs positive bandwidth and frequency");
    }
    double t_min = std::numeric_limits<double>::infinity();
    for (double t : data.temperatures) {
        if (t <= 0.0) {
            throw InvalidArgumentError("temperatures must be positive");
        }
        t_min = std::min(t_min, t);
    }
    const double hf = kPlanck * data.frequency;
    // without points in the coth curvature region the intercept cannot be
    // split into gain and noise
    if (kBoltzmann * t_min > 2.0 * hf) {
        throw SolverError("ill-conditioned Planck fit: lowest temperature " +
                          std::to_string(t_min) + " K is deep in the classical regime");
    }

    // P = G * [B h f coth(h f / 2 k_B T)/2] + (G n) * [B h f]
    RMat design(n, 2);
    RVec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = hf / (2.0 * kBoltzmann * data.temperatures[i]);
        design(static_cast<Eigen::Index>(i), 0) =
            data.bandwidth * hf * 0.5 / std::tanh(x);
        design(static_cast<Eigen::Index>(i), 1) = data.bandwidth * hf;
        y[static_cast<Eigen::Index>(i)] = data.powers[i];
    }
    auto fit = linear_solve(design, y);
    const double gain = fit.beta[0];
    if (gain <= 0.0) {
        throw SolverError("Planck fit produced a non-positive gain");
    }

    PlanckFitResult out;
    out.gain = gain;
    out.gain_db = 10.0 * std::log10(gain);
    out.noise_n = fit.beta[1] / gain;
    out.gain_stderr = std::sqrt(std::max(fit.covariance(0, 0), 0.0));
    // n = beta1 / beta0, first-order propagation with the full covariance
    const double d0 = -fit.beta[1] / (gain * gain);
    const double d1 = 1.0 / gain;
    const double var_n = d0 * d0 * fit.covariance(0, 0) +
                         d1 * d1 * fit.covariance(1, 1) +
                         2.0 * d0 * d1 * fit.covariance(0, 1);
    out.noise_stderr = std::sqrt(std::max(var_n, 0.0));
    return out;
}

AttenuationFitResult attenuation_fit(std::span<const double> drive_powers,
                                     std::span<const double> measured_powers,
                                     double gain, double noise_n,
                                     double bandwidth, double frequency) {
    if (gain <= 0.0) {
        throw InvalidArgumentError("attenuation fit needs a calibrated gain");
    }
    LinearFit fit = linear_least_squares(drive_powers, measured_powers);
    if (fit.slope <= 0.0) {
        throw DegenerateInputError("attenuation fit: non-positive power slope");
    }
    AttenuationFitResult out;
    out.attenuation = fit.slope / gain;
    out.attenuation_db = 10.0 * std::log10(out.attenuation);
    out.intercept = fit.intercept;
    (void)noise_n;
    (void)bandwidth;
    (void)frequency;
    return out;
}

const MomentEntry& MomentTable::at(int i, int j) const {
    auto it = entries_.find({i, j});
    if (it == entries_.end()) {
        throw InvalidArgumentError("moment (" + std::to_string(i) + ", " +
                                   std::to_string(j) + ") is not in the table");
    }
    return it->second;
}

MomentEntry& MomentTable::entry(int i, int j) {
    return entries_[{i, j}];
}

bool MomentTable::has(int i, int j) const {
    return entries_.count({i, j}) > 0;
}

double MomentTable::hermitian_pairing_error() const {
    double worst = 0.0;
    for (const auto& [key, entry] : entries_) {
        auto partner = entries_.find({key.second, key.first});
        if (partner != entries_.end()) {
            worst = std::max(worst,
                             std::abs(entry.value - std::conj(partner->second.value)));
        }
    }
    return worst;
}

namespace {

// sample mean and standard error of conj(s)^i s^j
MomentEntry monomial_moment(std::span<const Complex> samples, int i, int j) {
    Complex mean = 0.0;
    double abs2 = 0.0;
    for (const Complex& s : samples) {
        Complex m(1.0, 0.0);
        const Complex sc = std::conj(s);
        for (int k = 0; k < i; ++k) m *= sc;
        for (int k = 0; k < j; ++k) m *= s;
        mean += m;
        abs2 += std::norm(m);
    }
    const double n = double(samples.size());
    mean /= n;
    abs2 /= n;
    MomentEntry e;
    e.value = mean;
    e.stderr = std::sqrt(std::max(abs2 - std::norm(mean), 0.0) / n);
    return e;
}

void require_samples(std::size_t count, int max_order) {
    double needed = std::pow(10.0, 3 + max_order);
    if (double(count) < needed) {
        throw InsufficientDataError(
            "order-" + std::to_string(max_order) + " moments need >= " +
            std::to_string(std::size_t(needed)) + " samples, got " +
            std::to_string(count));
    }
}

}  // namespace

NoiseReference noise_reference(std::span<const Complex> samples, int max_order) {
    require_samples(samples.size(), max_order);
    NoiseReference ref;
    ref.moments = MomentTable(max_order);
    for (int total = 0; total <= max_order; ++total) {
        for (int i = 0; i <= total; ++i) {
            const int j = total - i;
            // vacuum reference: <h^i (h^dag)^j> = <(S^dag)^i S^j>
            ref.moments.entry(i, j) = monomial_moment(samples, i, j);
        }
    }
    ref.moments.entry(0, 0) = {Complex(1.0, 0.0), 0.0};

    const double n = double(samples.size());
    Complex m3 = 0.0, m3p = 0.0, m2 = 0.0;
    double m2abs = 0.0, m4 = 0.0, m6 = 0.0, m8 = 0.0;
    for (const Complex& s : samples) {
        const double a2 = std::norm(s);
        m3 += s * s * std::conj(s);
        m3p += s * s * s;
        m2 += s * s;
        m2abs += a2;
        m4 += a2 * a2;
        m6 += a2 * a2 * a2;  // also |s^2 conj(s)|^2
        m8 += a2 * a2 * a2 * a2;
    }
    m3 /= n;
    m3p /= n;
    m2 /= n;
    m2abs /= n;
    m4 /= n;
    m6 /= n;
    m8 /= n;
    ref.diagnostics.third_moment = m3;
    ref.diagnostics.third_moment_pure = m3p;
    ref.diagnostics.fourth_cumulant = m4 - 2.0 * m2abs * m2abs - std::norm(m2);
    ref.diagnostics.third_stderr = std::sqrt(std::max(m6 - std::norm(m3), 0.0) / n);
    // first-order: Var(m4) plus the propagated -2 m2^2 term
    const double var_m4 = std::max(m8 - m4 * m4, 0.0) / n;
    const double var_m2abs = std::max(m4 - m2abs * m2abs, 0.0) / n;
    ref.diagnostics.fourth_stderr =
        std::sqrt(var_m4 + 16.0 * m2abs * m2abs * var_m2abs);
    return ref;
}

namespace {

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) {
        out *= double(n - k + i) / double(i);
    }
    return out;
}

}  // namespace

MomentTable reconstruct_output_moments(std::span<const Complex> samples,
                                       const MomentTable& noise, int max_order) {
    if (max_order > noise.max_order()) {
        throw InvalidArgumentError("noise table covers order " +
                                   std::to_string(noise.max_order()) +
                                   " but order " + std::to_string(max_order) +
                                   " was requested");
    }
    require_samples(samples.size(), max_order);

    MomentTable out(max_order);
    out.entry(0, 0) = {Complex(1.0, 0.0), 0.0};
    for (int total = 1; total <= max_order; ++total) {
        for (int n = 0; n <= total; ++n) {
            const int m = total - n;
            MomentEntry s_moment = monomial_moment(samples, n, m);
            Complex value = s_moment.value;
            double var = s_moment.stderr * s_moment.stderr;
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= m; ++j) {
                    if (i == n && j == m) {
                        continue;
                    }
                    const double coeff = binomial(n, i) * binomial(m, j);
                    const MomentEntry& b_low = out.at(i, j);
                    const MomentEntry& h_mom = noise.at(n - i, m - j);
                    value -= coeff * b_low.value * h_mom.value;
                    var += coeff * coeff *
                           (std::norm(b_low.value) * h_mom.stderr * h_mom.stderr +
                            std::norm(h_mom.value) * b_low.stderr * b_low.stderr);
                }
            }
            out.entry(n, m) = {value, std::sqrt(var)};
        }
    }
    return out;
}

MomentTable cavity_moments(const MomentTable& output, double kappa_ext) {
    if (kappa_ext <= 0.0) {
        throw InvalidArgumentError("cavity moments need kappa_ext > 0");
    }
    MomentTable out(output.max_order());
    for (int total = 0; total <= output.max_order(); ++total) {
        for (int k = 0; k <= total; ++k) {
            const int l = total - k;
            if (!output.has(k, l)) {
                continue;
            }
            const double factor = std::pow(kappa_ext / 2.0, -0.5 * (k + l));
            const MomentEntry& src = output.at(k, l);
            out.entry(k, l) = {src.value * factor, src.stderr * factor};
        }
    }
    return out;
}

MomentSqueezing squeezing_from_moments(const MomentTable& cavity) {
    const MomentEntry& a_mean = cavity.at(0, 1);
    const MomentEntry& a2 = cavity.at(0, 2);
    const MomentEntry& n = cavity.at(1, 1);

    const double n_c = n.value.real() - std::norm(a_mean.value);
    const Complex m_c = a2.value - a_mean.value * a_mean.value;

    MomentSqueezing out;
    out.variance = 0.5 + n_c - std::abs(m_c);
    double phi = 0.5 * (std::arg(m_c) + kPi);
    phi = std::fmod(phi, kPi);
    if (phi < 0.0) {
        phi += kPi;
    }
    out.phi = std::abs(m_c) > 0.0 ? phi : 0.0;
    // first-order combination; the cross terms from <a> are subleading for
    // near-symmetric states
    out.stderr = std::sqrt(n.stderr * n.stderr + a2.stderr * a2.stderr +
                           4.0 * std::norm(a_mean.value) * a_mean.stderr * a_mean.stderr);
    return out;
}

std::vector<Complex> sample_envelope_stream(const GaussianStateSpec& state,
                                            double noise_n, std::size_t count,
                                            std::uint64_t seed) {
    if (noise_n < 0.0) {
        throw InvalidArgumentError("noise_n must be non-negative");
    }
    // normal-ordered central covariance of the state...
    const double n_c = state.occupation - std::norm(state.mean);
    const Complex m_c = state.anomalous - state.mean * state.mean;
    // ...plus the anti-normal chain unit: total per-quadrature covariance
    const double base = 0.5 * (n_c + noise_n + 1.0);
    const double sxx = base + 0.5 * m_c.real();
    const double syy = base - 0.5 * m_c.real();
    const double sxy = 0.5 * m_c.imag();
    const double det = sxx * syy - sxy * sxy;
    if (sxx <= 0.0 || det <= 0.0) {
        throw InvalidArgumentError(
            "state covariance plus chain noise is not positive definite; "
            "the squeezing exceeds what the noise floor can carry");
    }
    const double l11 = std::sqrt(sxx);
    const double l21 = sxy / l11;
    const double l22 = std::sqrt(syy - l21 * l21);

    CounterRng rng(seed, 0x5a3cull);
    std::vector<Complex> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double g1 = rng.normal();
        const double g2 = rng.normal();
        out[k] = state.mean + Complex(l11 * g1, l21 * g1 + l22 * g2);
    }
    return out;
}

std::vector<Complex> samples_from_record(const TrajectoryRecord& record) {
    if (!record.chain) {
        throw InvalidArgumentError("record lacks measurement-chain metadata");
    }
    const double scale = 1.0 / std::sqrt(record.chain->gain);
    std::vector<Complex> out(record.i_vals.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = scale * Complex(record.i_vals[k], record.q_vals[k]);
    }
    return out;
}

}  // namespace dpt
