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

#include "dpt/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpt/errors.hpp"
#include "dpt/fitting.hpp"
#include "dpt/parallel.hpp"
#include "dpt/rng.hpp"
#include "dpt/semiclassical.hpp"
#include "dpt/spectral.hpp"
#include "dpt/steadystate.hpp"

namespace dpt {

namespace {

double default_dt(const ModelParams& p, double n_est) {
    const double fastest = std::max({p.kappa, std::abs(p.delta), p.drive,
                                     std::abs(p.kerr) * std::max(n_est, 1.0), 1e-12});
    return 0.02 / fastest;
}

}  // namespace

SweepResult run_schedule(const ModelParams& params, const SweepSchedule& schedule,
                         const CVec& psi0, double dt, std::uint64_t seed,
                         const TrajectoryOptions& opts) {
    if (!schedule.valid()) {
        throw InvalidArgumentError("sweep schedule violates its invariants "
                                   "(positive durations, >= 2 steps per segment)");
    }
    const int dim = static_cast<int>(psi0.size());

    // worst-case rates over the schedule pin the step size
    double delta_max = 0.0, drive_max = 0.0;
    for (const auto& seg : schedule.segments) {
        delta_max = std::max({delta_max, std::abs(seg.delta_start), std::abs(seg.delta_end)});
        drive_max = std::max({drive_max, seg.drive_start, seg.drive_end});
    }
    ModelParams worst = params;
    worst.delta = delta_max;
    worst.drive = drive_max;
    if (dt <= 0.0) {
        dt = default_dt(worst, double(dim) * 0.5);
    }

    const int dwell_steps = std::max(1, int(std::llround(schedule.dwell / dt)));
    const double dwell = dwell_steps * dt;

    TrajectoryOptions step_opts = opts;
    StochasticStepper stepper(worst, dim, step_opts);
    const FockOperators& ops = stepper.ops();

    SweepResult result;
    CounterRng rng(seed, params.hash() ^ 0x5eedull);
    CVec psi = psi0.normalized();
    double t_global = 0.0;

    for (const auto& seg : schedule.segments) {
        const int n_steps = std::max(2, int(std::llround(seg.duration / dwell)));
        for (int k = 0; k < n_steps; ++k) {
            const double frac = n_steps > 1 ? double(k) / double(n_steps - 1) : 0.0;
            const double delta = seg.delta_start + frac * (seg.delta_end - seg.delta_start);
            const double drive = seg.drive_start + frac * (seg.drive_end - seg.drive_start);
            stepper.set_ramp(delta, drive);

            Complex acc_a = 0.0;
            double acc_n = 0.0;
            for (int s = 0; s < dwell_steps; ++s) {
                stepper.step(psi, dt, rng);
                acc_a += psi.dot(ops.a * psi);
                acc_n += psi.dot(ops.number * psi).real();
            }
            result.times.push_back(t_global + 0.5 * dwell);
            result.delta.push_back(delta);
            result.drive.push_back(drive);
            result.i_vals.push_back((acc_a / double(dwell_steps)).real());
            result.q_vals.push_back((acc_a / double(dwell_steps)).imag());
            result.n_vals.push_back(acc_n / double(dwell_steps));
            t_global += dwell;
        }
    }
    result.final_state = psi;
    return result;
}

DecayResult decay_experiment(const ModelParams& reduced, InitialState init,
                             const DecayOptions& opts) {
    ModelParams scaled = rescale(reduced);
    const int dim = opts.cutoff;
    auto ops = build_fock_operators(dim);
    auto lv = build_liouvillian(scaled, ops);
    SteadyStateOptions sso;
    sso.check_degeneracy = false;
    const double n_ss = photon_number(steady_state(lv, sso).rho, ops);

    const double dt = opts.dt > 0.0 ? opts.dt : default_dt(scaled, std::max(n_ss, 2.0));
    const double tau_int = opts.tau_int > 0.0 ? opts.tau_int : 40.0 * dt;

    CVec psi0;
    if (init == InitialState::kVacuum) {
        psi0 = fock_state(dim, 0);
    } else {
        PrepareBrightOptions prep;
        prep.cutoff = dim;
        prep.dt = dt;
        // desk-scale ramp: start well below the bright onset and sweep in
        // a few hundred lifetimes
        prep.delta_start = -2.0 * scaled.drive - 2.0 * scaled.kappa;
        prep.drive_strong = 1.5 * scaled.drive;
        prep.ramp_rate = (scaled.delta - prep.delta_start) / (100.0 / scaled.kappa);
        psi0 = prepare_bright(scaled, prep, opts.seed ^ 0xb1u);
    }

    TrajectoryOptions traj_opts;
    traj_opts.tau_int = tau_int;

    auto mean_curve = [&](int n_traj, double horizon, std::uint64_t seed_base,
                          std::vector<std::vector<double>>* keep)
        -> std::pair<std::vector<double>, std::vector<double>> {
        std::vector<std::vector<double>> curves(n_traj);
        std::vector<double> times;
        parallel_for(n_traj, opts.workers, [&](int k) {
            auto rec = simulate_trajectory(scaled, psi0, horizon, dt,
                                           seed_base + std::uint64_t(k), traj_opts);
            curves[k] = rec.n_vals;
            if (k == 0) {
                times = rec.times;
            }
        });
        std::vector<double> mean(curves[0].size(), 0.0);
        for (const auto& c : curves) {
            for (std::size_t i = 0; i < mean.size(); ++i) {
                mean[i] += c[i];
            }
        }
        for (double& v : mean) {
            v /= double(n_traj);
        }
        if (keep) {
            *keep = std::move(curves);
        }
        return {times, mean};
    };

    // pilot: establish decay separation and a first rate estimate
    const double pilot_horizon =
        opts.pilot_horizon > 0.0 ? opts.pilot_horizon : 20.0 / scaled.kappa;
    auto [pilot_times, pilot_mean] = mean_curve(opts.pilot_traj, pilot_horizon,
                                                opts.seed * 7919u + 1, nullptr);
    const double delta_n0 = pilot_mean.front() - n_ss;
    double spread = 0.0;
    for (double v : pilot_mean) {
        spread += (v - n_ss) * (v - n_ss);
    }
    spread = std::sqrt(spread / double(pilot_mean.size()));
    if (std::abs(delta_n0) < 3.0 * spread / std::sqrt(double(opts.pilot_traj)) ||
        std::abs(delta_n0) < 1e-3 * std::max(n_ss, 1.0)) {
        throw DegenerateInputError(
            "uninformative regime: initial population is indistinguishable "
            "from the steady state");
    }

    // crude pilot rate from the first e-fold crossing
    double lambda_pilot = scaled.kappa;
    for (std::size_t i = 0; i < pilot_mean.size(); ++i) {
        if (std::abs(pilot_mean[i] - n_ss) < std::abs(delta_n0) / std::exp(1.0)) {
            lambda_pilot = 1.0 / std::max(pilot_times[i], 1e-12);
            break;
        }
        if (i + 1 == pilot_mean.size()) {
            lambda_pilot = 0.5 / pilot_times.back();
        }
    }

    const double horizon =
        opts.horizon > 0.0 ? opts.horizon : std::max(3.0 / lambda_pilot, pilot_horizon);

    std::vector<std::vector<double>> curves;
    auto [times, mean] = mean_curve(opts.n_traj, horizon, opts.seed * 104729u + 3, &curves);

    auto fit_lambda = [&](const std::vector<double>& curve) {
        auto residuals = [&](const RVec& p) -> RVec {
            RVec r(curve.size());
            for (std::size_t i = 0; i < curve.size(); ++i) {
                r[static_cast<Eigen::Index>(i)] =
                    n_ss + p[0] * std::exp(-std::abs(p[1]) * times[i]) - curve[i];
            }
            return r;
        };
        RVec start(2);
        start[0] = delta_n0;
        start[1] = lambda_pilot;
        auto lm = levenberg_marquardt(residuals, start);
        return std::pair<double, double>(std::abs(lm.params[1]), lm.params[0]);
    };

    DecayResult result;
    auto [lambda, amp] = fit_lambda(mean);
    result.lambda = lambda;
    result.delta_n = amp;
    result.n_ss = n_ss;
    result.horizon = horizon;
    result.n_traj = opts.n_traj;
    result.times = times;
    result.n_mean = mean;

    // bootstrap over ensemble members
    CounterRng rng(opts.seed, 0xb00cull);
    std::vector<double> rates;
    rates.reserve(opts.bootstrap);
    std::vector<double> resampled(mean.size());
    for (int b = 0; b < opts.bootstrap; ++b) {
        std::fill(resampled.begin(), resampled.end(), 0.0);
        for (int k = 0; k < opts.n_traj; ++k) {
            const auto pick = std::min<std::size_t>(
                static_cast<std::size_t>(rng.uniform() * opts.n_traj), opts.n_traj - 1);
            for (std::size_t i = 0; i < resampled.size(); ++i) {
                resampled[i] += curves[pick][i];
            }
        }
        for (double& v : resampled) {
            v /= double(opts.n_traj);
        }
        rates.push_back(fit_lambda(resampled).first);
    }
    std::sort(rates.begin(), rates.end());
    const auto lo = static_cast<std::size_t>(0.025 * rates.size());
    const auto hi = static_cast<std::size_t>(0.975 * rates.size());
    result.ci_low = rates[lo];
    result.ci_high = rates[std::min(hi, rates.size() - 1)];
    return result;
}

CVec prepare_bright(const ModelParams& target, const PrepareBrightOptions& opts,
                    std::uint64_t seed) {
    const int dim = opts.cutoff;
    const double ramp_time = std::abs(target.delta - opts.delta_start) / opts.ramp_rate;

    ModelParams worst = target;
    worst.delta = std::max(std::abs(opts.delta_start), std::abs(target.delta));
    worst.drive = std::max(opts.drive_strong, target.drive);
    const double dt = opts.dt > 0.0 ? opts.dt : default_dt(worst, double(dim) * 0.5);

    SweepSchedule schedule;
    schedule.dwell = std::max(10.0 * dt, ramp_time / 400.0);
    // hold at strong drive and large negative detuning, then ramp the
    // detuning at fixed strong drive
    schedule.segments.push_back({std::max(5.0 / target.kappa, 3.0 * schedule.dwell),
                                 opts.delta_start, opts.delta_start,
                                 opts.drive_strong, opts.drive_strong});
    schedule.segments.push_back({std::max(ramp_time, 3.0 * schedule.dwell),
                                 opts.delta_start, target.delta,
                                 opts.drive_strong, opts.drive_strong});
    // abrupt drop of the drive to the target, with an optional settle hold
    const double settle = opts.settle > 0.0 ? opts.settle : 2.0 / target.kappa;
    schedule.segments.push_back({settle, target.delta, target.delta,
                                 target.drive, target.drive});

    auto sweep = run_schedule(target, schedule, fock_state(dim, 0), dt, seed);

    auto ops = build_fock_operators(dim);
    const double n_final =
        sweep.final_state.dot(ops.number * sweep.final_state).real();
    const double vacuum_level = target.n_th + 0.1;
    if (n_final < 3.0 * vacuum_level) {
        throw DegenerateInputError("bright-state preparation failed: final "
                                   "population " + std::to_string(n_final) +
                                   " is at the vacuum level");
    }
    return sweep.final_state;
}

namespace {

HysteresisResult sweep_pair(const ModelParams& scaled, const HysteresisOptions& opts) {
    if (opts.delta_max <= opts.delta_min || opts.sweep_time <= 0.0) {
        throw InvalidArgumentError("hysteresis needs delta_max > delta_min and T > 0");
    }
    const double dwell =
        opts.dwell > 0.0 ? opts.dwell : opts.sweep_time / 200.0;
    const int dim = opts.cutoff;

    SweepSchedule up;
    up.dwell = dwell;
    up.segments.push_back({opts.sweep_time, opts.delta_min, opts.delta_max,
                           scaled.drive, scaled.drive});
    SweepSchedule down;
    down.dwell = dwell;
    down.segments.push_back({opts.sweep_time, opts.delta_max, opts.delta_min,
                             scaled.drive, scaled.drive});

    ModelParams worst = scaled;
    worst.delta = std::max(std::abs(opts.delta_min), std::abs(opts.delta_max));
    const double dt = opts.dt > 0.0 ? opts.dt : default_dt(worst, double(dim) * 0.5);

    std::vector<std::vector<double>> up_runs(opts.n_reps), down_runs(opts.n_reps);
    std::vector<double> delta_grid;
    parallel_for(opts.n_reps, opts.workers, [&](int rep) {
        auto up_res = run_schedule(scaled, up, fock_state(dim, 0), dt,
                                   opts.seed + 2 * rep);
        auto down_res = run_schedule(scaled, down, fock_state(dim, 0), dt,
                                     opts.seed + 2 * rep + 1);
        up_runs[rep] = up_res.n_vals;
        down_runs[rep] = down_res.n_vals;
        if (rep == 0) {
            delta_grid = up_res.delta;
        }
    });

    HysteresisResult result;
    result.delta = delta_grid;
    result.sweep_time = opts.sweep_time;
    const std::size_t n_steps = delta_grid.size();
    result.n_up.assign(n_steps, 0.0);
    result.n_down.assign(n_steps, 0.0);
    for (int rep = 0; rep < opts.n_reps; ++rep) {
        for (std::size_t k = 0; k < n_steps; ++k) {
            result.n_up[k] += up_runs[rep][k];
            // the down sweep visits the grid in reverse order
            result.n_down[n_steps - 1 - k] += down_runs[rep][k];
        }
    }
    double area = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        result.n_up[k] /= double(opts.n_reps);
        result.n_down[k] /= double(opts.n_reps);
        area += result.n_up[k] - result.n_down[k];
    }
    result.area = area / double(n_steps);
    return result;
}

}  // namespace

HysteresisResult hysteresis(const ModelParams& reduced, const HysteresisOptions& opts) {
    return sweep_pair(rescale(reduced), opts);
}

HysteresisResult hysteresis_area(std::span<const double> delta_up,
                                 std::span<const double> n_up,
                                 std::span<const double> delta_down,
                                 std::span<const double> n_down,
                                 double sweep_time) {
    if (delta_up.size() != n_up.size() || delta_down.size() != n_down.size() ||
        delta_up.size() < 2 || delta_down.size() < 2) {
        throw InvalidArgumentError("hysteresis_area needs two sampled curves");
    }
    HysteresisResult result;
    result.sweep_time = sweep_time;

    const bool same_grid =
        delta_up.size() == delta_down.size() &&
        std::equal(delta_up.begin(), delta_up.end(), delta_down.begin(),
                   [](double a, double b) { return std::abs(a - b) < 1e-12; });

    auto interp = [](std::span<const double> x, std::span<const double> y, double at) {
        // x ascending
        auto it = std::lower_bound(x.begin(), x.end(), at);
        if (it == x.begin()) return y.front();
        if (it == x.end()) return y.back();
        const auto hi = std::size_t(it - x.begin());
        const double f = (at - x[hi - 1]) / (x[hi] - x[hi - 1]);
        return y[hi - 1] + f * (y[hi] - y[hi - 1]);
    };

    if (same_grid) {
        result.delta.assign(delta_up.begin(), delta_up.end());
        result.n_up.assign(n_up.begin(), n_up.end());
        result.n_down.assign(n_down.begin(), n_down.end());
    } else {
        result.interpolated = true;
        const double lo = std::max(delta_up.front(), delta_down.front());
        const double hi = std::min(delta_up.back(), delta_down.back());
        if (hi <= lo) {
            throw InvalidArgumentError("hysteresis curves share no detuning support");
        }
        const std::size_t n = std::max(delta_up.size(), delta_down.size());
        for (std::size_t k = 0; k < n; ++k) {
            const double d = lo + (hi - lo) * double(k) / double(n - 1);
            result.delta.push_back(d);
            result.n_up.push_back(interp(delta_up, n_up, d));
            result.n_down.push_back(interp(delta_down, n_down, d));
        }
    }
    double area = 0.0;
    for (std::size_t k = 0; k < result.delta.size(); ++k) {
        area += result.n_up[k] - result.n_down[k];
    }
    result.area = area / double(result.delta.size());
    return result;
}

AreaScalingResult area_scaling(const ModelParams& reduced,
                               std::span<const double> sweep_times,
                               const HysteresisOptions& base) {
    if (sweep_times.size() < 4) {
        throw InvalidArgumentError("area scaling needs >= 4 sweep times");
    }
    const auto [mn, mx] = std::minmax_element(sweep_times.begin(), sweep_times.end());
    if (*mx / *mn < 10.0) {
        throw InvalidArgumentError("sweep times must span at least one decade");
    }

    AreaScalingResult result;
    result.sweep_times.assign(sweep_times.begin(), sweep_times.end());
    result.areas.resize(sweep_times.size());
    result.dropped.assign(sweep_times.size(), false);
    for (std::size_t k = 0; k < sweep_times.size(); ++k) {
        HysteresisOptions opts = base;
        opts.sweep_time = sweep_times[k];
        opts.seed = base.seed + 1000 * k;
        result.areas[k] = hysteresis(reduced, opts).area;
    }

    std::vector<double> log_t, log_a;
    for (std::size_t k = 0; k < sweep_times.size(); ++k) {
        if (result.areas[k] > 0.0) {
            log_t.push_back(std::log(sweep_times[k]));
            log_a.push_back(std::log(result.areas[k]));
        } else {
            result.dropped[k] = true;
        }
    }
    if (log_t.size() < 3) {
        throw SolverError("too few positive hysteresis areas for a power-law fit");
    }
    auto fit = linear_least_squares(log_t, log_a);
    result.exponent = fit.slope;
    result.exponent_stderr = fit.slope_stderr;
    result.r_squared = fit.r_squared;
    return result;
}

std::vector<ScanPoint> phase_diagram_scan(const ModelParams& reduced,
                                          std::span<const double> delta_grid,
                                          std::span<const double> scales,
                                          const ScanOptions& opts) {
    std::vector<ScanPoint> rows(delta_grid.size() * scales.size());

    parallel_for(static_cast<int>(rows.size()), opts.workers, [&](int idx) {
        const std::size_t si = idx / delta_grid.size();
        const std::size_t di = idx % delta_grid.size();
        ScanPoint& row = rows[idx];
        row.delta_tilde = delta_grid[di];
        row.scale = scales[si];
        ModelParams p = reduced;
        p.delta = delta_grid[di];
        p.scale = scales[si];
        ModelParams scaled = rescale(p);
        try {
            int cutoff = opts.fixed_cutoff;
            double n_val = 0.0;
            SteadyStateOptions sso;
            sso.check_degeneracy = false;
            if (cutoff <= 0) {
                auto observable = [&](int c) {
                    auto ops = build_fock_operators(c);
                    auto lv = build_liouvillian(scaled, ops);
                    return photon_number(steady_state(lv, sso).rho, ops);
                };
                auto conv = converged_cutoff(observable, opts.cutoff_rel_tol,
                                             opts.max_cutoff);
                cutoff = conv.cutoff;
                n_val = conv.value;
            }
            auto ops = build_fock_operators(cutoff);
            auto lv = build_liouvillian(scaled, ops);
            auto ss = steady_state(lv, sso);
            row.cutoff = cutoff;
            row.n_ss = opts.fixed_cutoff > 0 ? photon_number(ss.rho, ops) : n_val;
            row.n_tilde = row.n_ss / row.scale;
            auto sq = squeezing_parameter(ss.rho, ops);
            row.squeeze_min = sq.variance;
            row.squeeze_phi = sq.phi;
            row.a_abs = std::abs(expectation(ss.rho, ops.a));
            auto dist = phase_distribution(ss.rho, opts.binder_bins);
            row.binder = binder_cumulant_weighted(dist.phases, dist.density);
        } catch (const Error& e) {
            row.failed = true;
            row.error = e.what();
        }
    });

    // finite-difference derivatives along delta within each scale row
    const std::size_t nd = delta_grid.size();
    for (std::size_t si = 0; si < scales.size(); ++si) {
        for (std::size_t di = 0; di < nd; ++di) {
            ScanPoint& row = rows[si * nd + di];
            if (row.failed || nd < 3 || di == 0 || di + 1 == nd) {
                continue;
            }
            const ScanPoint& prev = rows[si * nd + di - 1];
            const ScanPoint& next = rows[si * nd + di + 1];
            if (prev.failed || next.failed) {
                continue;
            }
            const double h = 0.5 * (next.delta_tilde - prev.delta_tilde);
            row.dn_ddelta = (next.n_ss - prev.n_ss) / (2.0 * h);
            row.d2n_ddelta2 = (next.n_ss - 2.0 * row.n_ss + prev.n_ss) / (h * h);
        }
    }
    return rows;
}

double critical_detuning(std::span<const double> delta, std::span<const double> n) {
    if (delta.size() != n.size() || delta.size() < 3) {
        throw InvalidArgumentError("critical_detuning needs >= 3 matched points");
    }
    double best = 0.0, best_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < delta.size(); ++i) {
        const double slope = (n[i + 1] - n[i - 1]) / (delta[i + 1] - delta[i - 1]);
        if (slope > best_slope) {
            best_slope = slope;
            best = delta[i];
        }
    }
    return best;
}

GapScalingResult gap_scaling(const ModelParams& reduced,
                             std::span<const double> scales,
                             const GapScanGrids& grids) {
    if (scales.size() < 3) {
        throw InvalidArgumentError("gap scaling needs >= 3 scale values");
    }
    GapScalingResult result;
    auto ops = build_fock_operators(grids.cutoff);

    struct GapRow {
        std::vector<double> ssb;
        std::vector<double> first;
    };
    std::vector<GapRow> per_scale(scales.size());

    parallel_for(static_cast<int>(scales.size()), grids.workers, [&](int si) {
        GapRow& row = per_scale[si];
        ModelParams p = reduced;
        p.scale = scales[si];
        for (double d : grids.delta_ssb) {
            p.delta = d;
            auto lv = build_liouvillian(rescale(p), ops);
            row.ssb.push_back(std::abs(liouvillian_gaps(lv).lambda_ssb.real()));
        }
        for (double d : grids.delta_1st) {
            p.delta = d;
            auto lv = build_liouvillian(rescale(p), ops);
            row.first.push_back(std::abs(liouvillian_gaps(lv).lambda_1st.real()));
        }
    });

    for (std::size_t si = 0; si < scales.size(); ++si) {
        const GapRow& row = per_scale[si];
        const auto ssb_min = std::min_element(row.ssb.begin(), row.ssb.end());
        const auto first_min = std::min_element(row.first.begin(), row.first.end());
        result.ssb.push_back({scales[si], *ssb_min,
                              grids.delta_ssb[ssb_min - row.ssb.begin()]});
        result.first.push_back({scales[si], *first_min,
                                grids.delta_1st[first_min - row.first.begin()]});
    }

    auto fit_alpha = [](const std::vector<GapScalingPoint>& pts, bool& monotone,
                        double& r2) {
        std::vector<double> x, y;
        monotone = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            x.push_back(pts[i].scale);
            y.push_back(std::log(std::max(pts[i].min_gap, 1e-300)));
            if (i > 0 && pts[i].min_gap >= pts[i - 1].min_gap) {
                monotone = false;
            }
        }
        auto fit = linear_least_squares(x, y);
        r2 = fit.r_squared;
        return fit.slope;
    };
    result.alpha_ssb = fit_alpha(result.ssb, result.monotone_ssb, result.r2_ssb);
    result.alpha_1st = fit_alpha(result.first, result.monotone_1st, result.r2_1st);
    return result;
}

std::vector<TransientResult> transient_study(const ModelParams& reduced,
                                             std::span<const double> delta_grid_desc,
                                             std::span<const double> delays,
                                             int cutoff) {
    for (double d : delays) {
        if (d <= 0.0) {
            throw InvalidArgumentError("delays must be positive");
        }
    }
    for (std::size_t i = 1; i < delta_grid_desc.size(); ++i) {
        if (delta_grid_desc[i] >= delta_grid_desc[i - 1]) {
            throw InvalidArgumentError("transient study expects a descending detuning grid");
        }
    }
    auto ops = build_fock_operators(cutoff);
    SteadyStateOptions sso;
    sso.check_degeneracy = false;

    std::vector<TransientResult> out;
    for (double delay : delays) {
        TransientResult run;
        run.delay = delay;
        ModelParams p = reduced;
        p.delta = delta_grid_desc.front();
        CMat rho = CMat::Zero(cutoff, cutoff);
        rho(0, 0) = 1.0;  // start deep in the vacuum at the largest detuning
        for (double d : delta_grid_desc) {
            p.delta = d;
            ModelParams scaled = rescale(p);
            auto lv = build_liouvillian(scaled, ops);
            std::vector<double> t = {delay};
            rho = devectorize(evolve_master(lv, rho, t)[0]);
            TransientPoint pt;
            pt.delta_tilde = d;
            pt.n_measured = photon_number(rho, ops);
            pt.n_ss = photon_number(steady_state(lv, sso).rho, ops);
            run.points.push_back(pt);
        }
        out.push_back(std::move(run));
    }
    return out;
}

}  // namespace dpt
