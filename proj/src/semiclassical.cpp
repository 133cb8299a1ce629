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

#include "dpt/semiclassical.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "dpt/constants.hpp"
#include "dpt/errors.hpp"
#include "dpt/fitting.hpp"

namespace dpt {

double meanfield_nss(const ModelParams& params, bool plus_branch, bool half_damping) {
    const double damping = (params.kappa + params.kappa_phi) * (half_damping ? 0.5 : 1.0);
    const double disc = params.drive * params.drive - damping * damping;
    if (disc < 0.0) {
        return 0.0;
    }
    const double denom = std::hypot(params.kerr, params.kappa_two);
    if (denom <= 0.0) {
        throw InvalidArgumentError("mean-field photon number needs U or kappa_2 nonzero");
    }
    const double root = std::sqrt(disc);
    const double n = (params.delta + (plus_branch ? root : -root)) / denom;
    return std::max(n, 0.0);
}

namespace {

Complex meanfield_rhs(const ModelParams& p, Complex alpha, bool include_kappa_two) {
    const double n = std::norm(alpha);
    Complex out = -kImag * (p.delta + p.kerr * n) * alpha;
    out -= kImag * p.drive * std::conj(alpha);
    out -= 0.5 * (p.kappa + p.kappa_phi) * alpha;
    if (include_kappa_two) {
        out -= p.kappa_two * n * alpha;
    }
    return out;
}

// 2x2 real Jacobian of the flow at alpha, by central differences
Eigen::Matrix2d meanfield_jacobian(const ModelParams& p, Complex alpha,
                                   bool include_kappa_two) {
    const double h = 1e-7 * std::max(1.0, std::abs(alpha));
    Eigen::Matrix2d jac;
    const Complex fx_p = meanfield_rhs(p, alpha + h, include_kappa_two);
    const Complex fx_m = meanfield_rhs(p, alpha - h, include_kappa_two);
    const Complex fy_p = meanfield_rhs(p, alpha + Complex(0, h), include_kappa_two);
    const Complex fy_m = meanfield_rhs(p, alpha - Complex(0, h), include_kappa_two);
    jac(0, 0) = (fx_p.real() - fx_m.real()) / (2 * h);
    jac(1, 0) = (fx_p.imag() - fx_m.imag()) / (2 * h);
    jac(0, 1) = (fy_p.real() - fy_m.real()) / (2 * h);
    jac(1, 1) = (fy_p.imag() - fy_m.imag()) / (2 * h);
    return jac;
}

}  // namespace

MeanfieldTrace meanfield_ode(const ModelParams& params, Complex alpha0,
                             double horizon, const MeanfieldOptions& opts) {
    if (horizon <= 0.0) {
        throw InvalidArgumentError("horizon must be positive");
    }
    MeanfieldTrace trace;

    // adaptive-free RK4 with a step tied to the fastest rate
    const bool has_nonlinearity = params.kerr != 0.0 || params.kappa_two != 0.0;
    const double n_bright =
        has_nonlinearity ? meanfield_nss(params, /*plus_branch=*/true) : 0.0;
    const double n0 = std::max({std::norm(alpha0), n_bright, 1.0});
    const double fastest = std::max({params.kappa + params.kappa_phi,
                                     std::abs(params.delta), params.drive,
                                     params.kerr * n0, params.kappa_two * n0, 1e-12});
    const double dt = 0.01 / fastest;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
    const std::size_t stride = std::max<std::size_t>(1, steps / 2000);

    Complex alpha = alpha0;
    for (std::size_t s = 0; s <= steps; ++s) {
        if (s % stride == 0) {
            trace.times.push_back(s * dt);
            trace.alpha.push_back(alpha);
        }
        if (std::norm(alpha) > opts.blowup_photons) {
            throw SolverError("mean-field amplitude diverged beyond " +
                              std::to_string(opts.blowup_photons) + " photons");
        }
        const Complex k1 = meanfield_rhs(params, alpha, opts.include_kappa_two);
        const Complex k2 = meanfield_rhs(params, alpha + 0.5 * dt * k1, opts.include_kappa_two);
        const Complex k3 = meanfield_rhs(params, alpha + 0.5 * dt * k2, opts.include_kappa_two);
        const Complex k4 = meanfield_rhs(params, alpha + dt * k3, opts.include_kappa_two);
        alpha += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // fixed points: damped Newton from a ring of starts plus the origin
    std::vector<Complex> starts = {Complex(0.0, 0.0)};
    const double r_guess = std::sqrt(std::max(n_bright, 1.0));
    for (int ring = 1; ring <= 2; ++ring) {
        for (int k = 0; k < 8; ++k) {
            starts.push_back(std::polar(0.7 * ring * r_guess, kTwoPi * k / 8.0));
        }
    }
    std::vector<MeanfieldFixedPoint> found;
    for (Complex start : starts) {
        Complex z = start;
        bool ok = false;
        for (int it = 0; it < 80; ++it) {
            const Complex f = meanfield_rhs(params, z, opts.include_kappa_two);
            if (std::abs(f) < 1e-11 * std::max(1.0, std::abs(z))) {
                ok = true;
                break;
            }
            Eigen::Matrix2d jac = meanfield_jacobian(params, z, opts.include_kappa_two);
            Eigen::Vector2d rhs(-f.real(), -f.imag());
            Eigen::Matrix2d reg = jac;
            if (std::abs(reg.determinant()) < 1e-14) {
                reg(0, 0) += 1e-9;
                reg(1, 1) += 1e-9;
            }
            Eigen::Vector2d step = reg.lu().solve(rhs);
            double damp = 1.0;
            const double f0 = std::abs(f);
            for (int half = 0; half < 12; ++half) {
                const Complex trial = z + damp * Complex(step[0], step[1]);
                if (std::abs(meanfield_rhs(params, trial, opts.include_kappa_two)) < f0) {
                    z = trial;
                    break;
                }
                damp *= 0.5;
                if (half == 11) {
                    z += damp * Complex(step[0], step[1]);
                }
            }
        }
        if (!ok) {
            continue;
        }
        bool duplicate = false;
        for (const auto& fp : found) {
            if (std::abs(fp.alpha - z) < 1e-6 * std::max(1.0, std::abs(z))) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) {
            continue;
        }
        MeanfieldFixedPoint fp;
        fp.alpha = z;
        Eigen::Matrix2d jac = meanfield_jacobian(params, z, opts.include_kappa_two);
        const double tr = jac.trace();
        const double det = jac.determinant();
        fp.stable = tr < 0.0 && det > 0.0;
        found.push_back(fp);
    }
    std::sort(found.begin(), found.end(),
              [](const MeanfieldFixedPoint& a, const MeanfieldFixedPoint& b) {
                  return std::norm(a.alpha) < std::norm(b.alpha);
              });
    trace.fixed_points = std::move(found);
    return trace;
}

std::vector<double> duffing_response(double delta, double xi) {
    std::vector<double> roots;
    if (xi == 0.0) {
        roots.push_back(0.5 / (delta * delta + 0.25));
        return roots;
    }
    // xi^2 n^3 - 2 delta xi n^2 + (delta^2 + 1/4) n - 1/2 = 0 via the
    // companion matrix of the monic cubic
    const double a2 = -2.0 * delta / xi;
    const double a1 = (delta * delta + 0.25) / (xi * xi);
    const double a0 = -0.5 / (xi * xi);
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(0, 2) = -a0;
    companion(1, 2) = -a1;
    companion(2, 2) = -a2;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix3d> es(companion);
    for (int k = 0; k < 3; ++k) {
        const auto root = es.eigenvalues()[k];
        if (std::abs(root.imag()) < 1e-9 * std::max(1.0, std::abs(root)) &&
            root.real() > -1e-12) {
            roots.push_back(std::max(root.real(), 0.0));
        }
    }
    std::sort(roots.begin(), roots.end());
    // collapse numerically coincident roots (fold points)
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) {
                                return std::abs(a - b) < 1e-10 * std::max(1.0, a);
                            }),
                roots.end());
    return roots;
}

Complex s21(double omega, const ScatteringParams& sp, double xi,
            double n_scale_invariant) {
    const double kappa_tot = sp.kappa_ext + sp.kappa_int;
    if (kappa_tot <= 0.0) {
        throw InvalidArgumentError("scattering needs kappa_ext + kappa_int > 0");
    }
    const double delta = (omega - sp.omega_r) / kappa_tot;
    // engineering convention: j = -i
    const Complex j(0.0, -1.0);
    const Complex envelope =
        sp.env.amplitude * std::exp(j * sp.env.phase) * std::exp(-j * omega * sp.env.delay);
    const Complex mismatch = std::exp(j * sp.env.mismatch) / std::cos(sp.env.mismatch);
    const Complex lorentzian =
        1.0 / (1.0 + 2.0 * j * (delta - xi * n_scale_invariant));
    return envelope * (1.0 - (sp.kappa_ext / kappa_tot) * mismatch * lorentzian);
}

std::vector<Complex> s21_sweep(std::span<const double> omegas,
                               const ScatteringParams& sp, double xi,
                               SweepDirection direction) {
    std::vector<std::size_t> order(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) order[i] = i;
    if (direction == SweepDirection::kDown) {
        std::reverse(order.begin(), order.end());
    }

    std::vector<Complex> out(omegas.size());
    const double kappa_tot = sp.kappa_ext + sp.kappa_int;
    double n_prev = -1.0;
    for (std::size_t idx : order) {
        const double delta = (omegas[idx] - sp.omega_r) / kappa_tot;
        auto roots = duffing_response(delta, xi);
        double n_sel = roots.front();
        if (n_prev >= 0.0) {
            double best = std::numeric_limits<double>::infinity();
            for (double r : roots) {
                const double d = std::abs(r - n_prev);
                if (d < best) {
                    best = d;
                    n_sel = r;
                }
            }
            // the middle root of a 3-root window is dynamically unstable;
            // never land on it
            if (roots.size() == 3 && n_sel == roots[1]) {
                n_sel = std::abs(roots[0] - n_prev) < std::abs(roots[2] - n_prev)
                            ? roots[0]
                            : roots[2];
            }
        }
        n_prev = n_sel;
        out[idx] = s21(omegas[idx], sp, xi, n_sel);
    }
    return out;
}

S21FitResult s21_fit(std::span<const double> omegas,
                     std::span<const Complex> values,
                     const ScatteringParams& initial, double xi_init, bool fit_xi) {
    if (omegas.size() != values.size() || omegas.size() < 8) {
        throw InvalidArgumentError("s21_fit needs >= 8 matched samples");
    }
    // parameter vector: [kappa_ext, kappa_int, omega_r - w0, a, alpha, tau, phi, (xi)]
    const double w0 = initial.omega_r;
    const double kappa_scale = std::max(initial.kappa_ext + initial.kappa_int, 1.0);
    // reference the electronic-delay phase to the window center so the
    // absolute phase and the delay stay numerically independent
    double w_center = 0.0;
    for (double w : omegas) {
        w_center += w;
    }
    w_center /= double(omegas.size());

    auto unpack = [&](const RVec& p, ScatteringParams& sp, double& xi) {
        sp.kappa_ext = std::abs(p[0]) * kappa_scale;
        sp.kappa_int = std::abs(p[1]) * kappa_scale;
        sp.omega_r = w0 + p[2] * kappa_scale;
        sp.env.amplitude = p[3];
        sp.env.delay = p[5] / w0;
        sp.env.phase = p[4] + w_center * sp.env.delay;
        sp.env.mismatch = p[6];
        xi = fit_xi ? p[7] : xi_init;
    };

    auto residuals = [&](const RVec& p) -> RVec {
        ScatteringParams sp = initial;
        double xi = xi_init;
        unpack(p, sp, xi);
        RVec r(2 * omegas.size());
        auto model = s21_sweep(omegas, sp, xi, SweepDirection::kUp);
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            r[2 * i] = model[i].real() - values[i].real();
            r[2 * i + 1] = model[i].imag() - values[i].imag();
        }
        return r;
    };

    // seed the environment factor from the trace edges: the off-resonant
    // tails approximate a e^{j alpha} e^{-j omega tau}, which keeps the fit
    // out of phase-winding local minima regardless of the absolute delay
    const std::size_t n_edge = std::max<std::size_t>(2, omegas.size() / 10);
    Complex bg_left = 0.0, bg_right = 0.0;
    double w_left = 0.0, w_right = 0.0;
    for (std::size_t k = 0; k < n_edge; ++k) {
        bg_left += values[k];
        w_left += omegas[k];
        bg_right += values[values.size() - 1 - k];
        w_right += omegas[omegas.size() - 1 - k];
    }
    bg_left /= double(n_edge);
    bg_right /= double(n_edge);
    w_left /= double(n_edge);
    w_right /= double(n_edge);
    // engineering convention j = -i: arg grows with omega at rate +tau
    const double tau_est = std::arg(bg_right / bg_left) / (w_right - w_left);
    const double amp_est = 0.5 * (std::abs(bg_left) + std::abs(bg_right));
    const double centered_phase_est =
        std::arg(0.5 * (bg_left + bg_right)) - (0.5 * (w_left + w_right) - w_center) * tau_est;

    RVec init(fit_xi ? 8 : 7);
    init[0] = initial.kappa_ext / kappa_scale;
    init[1] = initial.kappa_int / kappa_scale;
    init[2] = 0.0;
    init[3] = amp_est;
    init[4] = centered_phase_est;
    init[5] = tau_est * w0;
    init[6] = initial.env.mismatch;
    if (fit_xi) {
        init[7] = xi_init;
    }

    auto lm = levenberg_marquardt(residuals, init);
    S21FitResult out;
    out.params = initial;
    unpack(lm.params, out.params, out.xi);
    out.chi2 = lm.chi2;
    out.converged = lm.converged;
    return out;
}

double cavity_inductance(double z0, double omega_quarter) {
    if (z0 <= 0.0 || omega_quarter <= 0.0) {
        throw InvalidArgumentError("impedance and frequency must be positive");
    }
    return z0 * (kPi / 2.0) / omega_quarter;
}

CircuitModes circuit_modes(const CircuitParams& circuit) {
    if (circuit.gamma0 < 0.0 || circuit.omega_quarter <= 0.0) {
        throw InvalidArgumentError("circuit needs gamma0 >= 0 and omega_quarter > 0");
    }
    const double cosf = std::cos(circuit.flux);
    if (std::abs(cosf) < 1e-3) {
        throw DegenerateInputError("flux too close to the SQUID degeneracy point");
    }

    CircuitModes modes;
    modes.gamma_eff = circuit.gamma0 / std::abs(cosf);
    modes.k0d_first_order = (kPi / 2.0) / (1.0 + modes.gamma_eff);
    modes.omega0_first_order =
        circuit.omega_quarter * modes.k0d_first_order / (kPi / 2.0);

    if (circuit.gamma0 == 0.0 && circuit.cap_ratio == 0.0) {
        modes.k0d = kPi / 2.0;
        modes.omega0 = circuit.omega_quarter;
        return modes;
    }

    // kd tan(kd) = 1/gamma - (C_J/C_cav)(kd)^2, root on (0, pi/2)
    const double inv_gamma = 1.0 / modes.gamma_eff;
    auto f = [&](double kd) {
        return kd * std::tan(kd) - (inv_gamma - circuit.cap_ratio * kd * kd);
    };
    double lo = 1e-9, hi = kPi / 2.0 - 1e-12;
    double f_lo = f(lo);
    if (f_lo > 0.0) {
        throw SolverError("no fundamental-mode root bracket; check gamma");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    modes.k0d = 0.5 * (lo + hi);
    modes.omega0 = circuit.omega_quarter * modes.k0d / (kPi / 2.0);
    return modes;
}

double kerr_from_circuit(const CircuitParams& circuit) {
    if (!circuit.l_cav || *circuit.l_cav <= 0.0) {
        throw InvalidArgumentError("kerr_from_circuit needs the cavity inductance");
    }
    CircuitModes modes = circuit_modes(circuit);
    const double kd = modes.k0d;
    const double m0 = 1.0 + std::sin(2.0 * kd) / (2.0 * kd) +
                      2.0 * circuit.cap_ratio * std::cos(kd) * std::cos(kd);
    const double bracket = std::cos(kd) * std::cos(kd) / (kd * kd * m0);
    const double phi0_sq = kReducedFluxQuantum * kReducedFluxQuantum;
    return -(kHbar * modes.omega0 * modes.omega0 * (*circuit.l_cav) /
             (2.0 * modes.gamma_eff * phi0_sq)) *
           bracket * bracket;
}

std::vector<FluxPoint> flux_tuning(const CircuitParams& circuit,
                                   std::span<const double> flux_values) {
    std::vector<FluxPoint> out;
    out.reserve(flux_values.size());
    for (double f : flux_values) {
        FluxPoint pt;
        pt.flux = f;
        CircuitParams at_flux = circuit;
        at_flux.flux = f;
        try {
            pt.omega_r = circuit_modes(at_flux).omega0;
        } catch (const DegenerateInputError&) {
            pt.degenerate = true;
        }
        out.push_back(pt);
    }
    return out;
}

FluxFitResult fit_flux_curve(std::span<const FluxPoint> points,
                             const CircuitParams& initial) {
    std::vector<FluxPoint> usable;
    for (const auto& p : points) {
        if (!p.degenerate) {
            usable.push_back(p);
        }
    }
    if (usable.size() < 3) {
        throw InsufficientDataError("flux fit needs >= 3 non-degenerate points");
    }
    const double w_scale = initial.omega_quarter;
    auto residuals = [&](const RVec& p) -> RVec {
        CircuitParams c = initial;
        c.gamma0 = std::abs(p[0]);
        c.omega_quarter = std::abs(p[1]) * w_scale;
        RVec r(usable.size());
        for (std::size_t i = 0; i < usable.size(); ++i) {
            c.flux = usable[i].flux;
            r[static_cast<Eigen::Index>(i)] =
                (circuit_modes(c).omega0 - usable[i].omega_r) / w_scale;
        }
        return r;
    };
    RVec init(2);
    init[0] = initial.gamma0;
    init[1] = 1.0;
    auto lm = levenberg_marquardt(residuals, init);
    FluxFitResult out;
    out.gamma0 = std::abs(lm.params[0]);
    out.omega_quarter = std::abs(lm.params[1]) * w_scale;
    out.converged = lm.converged;
    return out;
}

}  // namespace dpt
