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

#include "dpt/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpt/errors.hpp"
#include "dpt/rng.hpp"
#include "dpt/steadystate.hpp"

namespace dpt {

std::string to_string(FreeParam p) {
    switch (p) {
        case FreeParam::kKappaPhi: return "kappa_phi";
        case FreeParam::kKappaTwo: return "kappa_two";
        case FreeParam::kDrive: return "drive";
        case FreeParam::kNth: return "n_th";
        case FreeParam::kKerr: return "kerr";
        case FreeParam::kKappa: return "kappa";
    }
    return "?";
}

namespace {

double& field_of(ModelParams& p, FreeParam which) {
    switch (which) {
        case FreeParam::kKappaPhi: return p.kappa_phi;
        case FreeParam::kKappaTwo: return p.kappa_two;
        case FreeParam::kDrive: return p.drive;
        case FreeParam::kNth: return p.n_th;
        case FreeParam::kKerr: return p.kerr;
        case FreeParam::kKappa: return p.kappa;
    }
    throw InvalidArgumentError("unknown free parameter");
}

// RMS distance between two series each normalized by its own max |.|
double rms_distance(std::span<const double> a, std::span<const double> b,
                    bool log_scale) {
    if (a.size() != b.size() || a.empty()) {
        throw InvalidArgumentError("distance needs matched nonempty series");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    if (log_scale) {
        for (auto* v : {&x, &y}) {
            for (double& e : *v) {
                e = std::log10(std::max(std::abs(e), 1e-300));
            }
        }
    }
    auto normalize = [](std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        if (m > 0.0) {
            for (double& e : v) e /= m;
        }
    };
    normalize(x);
    normalize(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += (x[i] - y[i]) * (x[i] - y[i]);
    }
    return std::sqrt(acc / double(x.size()));
}

}  // namespace

ForwardCurves evaluate_forward(const ModelParams& reduced, const FitTarget& target,
                               int cutoff) {
    ForwardCurves out;
    auto ops = build_fock_operators(cutoff);
    SteadyStateOptions sso;
    sso.check_degeneracy = false;

    auto at_delta = [&](double delta_tilde) {
        ModelParams p = reduced;
        p.delta = delta_tilde;
        return rescale(p);
    };

    for (double d : target.delta_n) {
        auto lv = build_liouvillian(at_delta(d), ops);
        out.n.push_back(photon_number(steady_state(lv, sso).rho, ops));
    }
    GapOptions first_opts;
    first_opts.compute_ssb = false;
    for (double d : target.delta_1st) {
        auto lv = build_liouvillian(at_delta(d), ops);
        out.gap_1st.push_back(std::abs(liouvillian_gaps(lv, first_opts).lambda_1st.real()));
    }
    GapOptions ssb_opts;
    ssb_opts.compute_1st = false;
    for (double d : target.delta_ssb) {
        auto lv = build_liouvillian(at_delta(d), ops);
        out.gap_ssb.push_back(std::abs(liouvillian_gaps(lv, ssb_opts).lambda_ssb.real()));
    }
    return out;
}

CostBreakdown cost(const ModelParams& reduced, const FitTarget& target, int cutoff) {
    CostBreakdown out;
    ForwardCurves model;
    try {
        model = evaluate_forward(reduced, target, cutoff);
    } catch (const Error&) {
        out.total = std::numeric_limits<double>::infinity();
        return out;
    }

    double weight_present = 0.0;
    const double weight_all = target.weight_n + target.weight_1st + target.weight_ssb;
    double acc = 0.0;
    if (!target.n_values.empty()) {
        out.d_n = rms_distance(model.n, target.n_values, false);
        acc += target.weight_n * out.d_n;
        weight_present += target.weight_n;
    }
    if (!target.gap_1st.empty()) {
        out.d_1st = rms_distance(model.gap_1st, target.gap_1st, target.log_gap_distance);
        acc += target.weight_1st * out.d_1st;
        weight_present += target.weight_1st;
    }
    if (!target.gap_ssb.empty()) {
        out.d_ssb = rms_distance(model.gap_ssb, target.gap_ssb, target.log_gap_distance);
        acc += target.weight_ssb * out.d_ssb;
        weight_present += target.weight_ssb;
    }
    if (weight_present == 0.0) {
        throw InvalidArgumentError("fit target holds no series");
    }
    out.partial = weight_present != weight_all;
    out.total = acc * (weight_all / weight_present);
    return out;
}

AnnealResult anneal(const ModelParams& init, const std::vector<FreeParam>& free_params,
                    const FitTarget& target, int cutoff, const AnnealConfig& config) {
    if (free_params.empty()) {
        throw InvalidArgumentError("anneal needs at least one free parameter");
    }
    if (config.t0 <= 0.0 || config.cooling <= 0.0 || config.cooling >= 1.0 ||
        config.proposal_sigma_frac <= 0.0) {
        throw InvalidArgumentError("anneal config violates its invariants");
    }
    if (!init.valid()) {
        throw InvalidArgumentError("initial parameters are out of bounds");
    }

    CounterRng rng(config.seed, 0xa22ea1ull);
    AnnealResult result;
    ModelParams current = init;
    double current_cost = cost(current, target, cutoff).total;
    result.best = current;
    result.best_cost = current_cost;

    const bool kerr_negative = std::signbit(init.kerr);
    auto propose = [&](const ModelParams& from) {
        ModelParams next = from;
        for (FreeParam fp : free_params) {
            double& field = field_of(next, fp);
            const double sigma = config.proposal_sigma_frac * std::abs(field);
            field += sigma * rng.normal();
            // reflect at zero; the Kerr sign is a model convention and is
            // kept on its initial side
            if (fp == FreeParam::kKerr) {
                if (std::signbit(field) != kerr_negative) {
                    field = -field;
                }
            } else if (field < 0.0) {
                field = -field;
            }
        }
        return next;
    };

    double t0 = config.t0;
    if (config.tune_t0) {
        // median worse-move cost jump from the start, aiming at ~50%
        // early acceptance of typical uphill moves
        std::vector<double> jumps;
        for (int k = 0; k < 16; ++k) {
            const double c = cost(propose(current), target, cutoff).total;
            if (std::isfinite(c) && c > current_cost) {
                jumps.push_back(c - current_cost);
            }
        }
        if (!jumps.empty()) {
            std::nth_element(jumps.begin(), jumps.begin() + jumps.size() / 2, jumps.end());
            const double median = jumps[jumps.size() / 2];
            if (median > 0.0) {
                t0 = median / std::log(2.0);
            }
        }
    }
    result.t0_used = t0;

    int infeasible_streak = 0;
    for (int iter = 0; iter < config.iterations; ++iter) {
        const double temperature = t0 * std::pow(config.cooling, iter);
        ModelParams proposal = propose(current);
        const double c_new = cost(proposal, target, cutoff).total;

        AnnealStep step;
        step.iteration = iter;
        step.temperature = temperature;
        step.proposal = proposal;
        step.cost_value = c_new;

        if (!std::isfinite(c_new)) {
            if (++infeasible_streak >= config.iterations) {
                throw SolverError("all proposals were infeasible");
            }
            step.accepted = false;
        } else {
            infeasible_streak = 0;
            bool accept = c_new < current_cost;
            if (!accept) {
                const double u = rng.uniform();
                accept = u < std::exp(-(c_new - current_cost) / temperature);
            } else {
                (void)rng.uniform();  // fixed RNG consumption per iteration
            }
            if (accept) {
                current = proposal;
                current_cost = c_new;
            }
            step.accepted = accept;
            if (c_new < result.best_cost) {
                result.best = proposal;
                result.best_cost = c_new;
            }
        }
        step.best_cost = result.best_cost;
        result.trace.push_back(step);
    }
    result.final = current;
    result.final_cost = current_cost;
    return result;
}

AnnealResult anneal_chains(const ModelParams& init,
                           const std::vector<FreeParam>& free_params,
                           const FitTarget& target, int cutoff,
                           const AnnealConfig& config, int n_chains) {
    if (n_chains < 1) {
        throw InvalidArgumentError("need at least one chain");
    }
    AnnealResult best;
    bool first = true;
    for (int c = 0; c < n_chains; ++c) {
        AnnealConfig chain_config = config;
        chain_config.seed = config.seed + static_cast<std::uint64_t>(c) * 0x9e3779b9ull;
        AnnealResult r = anneal(init, free_params, target, cutoff, chain_config);
        if (first || r.best_cost < best.best_cost) {
            best = std::move(r);
            first = false;
        }
    }
    return best;
}

SensitivityReport sensitivity_scan(const ModelParams& reduced,
                                   std::vector<double> delta_grid,
                                   const SensitivityOptions& opts) {
    SensitivityReport report;
    report.delta_grid = std::move(delta_grid);

    FitTarget grid;
    grid.delta_n = report.delta_grid;
    grid.delta_1st = report.delta_grid;
    grid.delta_ssb = report.delta_grid;

    report.base = evaluate_forward(reduced, grid, opts.cutoff);

    auto max_rel_change = [&](const ForwardCurves& varied) {
        std::array<double, 3> idx{0.0, 0.0, 0.0};
        auto one = [](const std::vector<double>& base, const std::vector<double>& v) {
            double worst = 0.0;
            for (std::size_t i = 0; i < base.size(); ++i) {
                const double denom = std::max(std::abs(base[i]), 1e-12);
                worst = std::max(worst, std::abs(v[i] - base[i]) / denom);
            }
            return worst;
        };
        idx[0] = one(report.base.n, varied.n);
        idx[1] = one(report.base.gap_1st, varied.gap_1st);
        idx[2] = one(report.base.gap_ssb, varied.gap_ssb);
        return idx;
    };

    for (FreeParam fp : {FreeParam::kKerr, FreeParam::kDrive, FreeParam::kKappa}) {
        ModelParams lo = reduced, hi = reduced;
        field_of(lo, fp) *= (1.0 - opts.rel_change);
        field_of(hi, fp) *= (1.0 + opts.rel_change);
        ForwardCurves lo_curves = evaluate_forward(lo, grid, opts.cutoff);
        ForwardCurves hi_curves = evaluate_forward(hi, grid, opts.cutoff);
        auto idx_lo = max_rel_change(lo_curves);
        auto idx_hi = max_rel_change(hi_curves);
        std::array<double, 3> idx{};
        for (int k = 0; k < 3; ++k) {
            idx[k] = std::max(idx_lo[k], idx_hi[k]);
        }
        report.indices[to_string(fp)] = idx;
        report.envelopes[to_string(fp)] = {std::move(lo_curves), std::move(hi_curves)};
    }

    std::array<double, 3> k2_idx{0.0, 0.0, 0.0};
    for (double factor : opts.kappa_two_factors) {
        ModelParams varied = reduced;
        varied.kappa_two *= factor;
        ForwardCurves curves = evaluate_forward(varied, grid, opts.cutoff);
        auto idx = max_rel_change(curves);
        for (int k = 0; k < 3; ++k) {
            k2_idx[k] = std::max(k2_idx[k], idx[k]);
        }
        report.kappa_two_ladder[factor] = std::move(curves);
    }
    report.indices[to_string(FreeParam::kKappaTwo)] = k2_idx;
    return report;
}

}  // namespace dpt
