// Copyright 2026 The twinsub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "twinsub/estimation.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace twinsub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slopes below this fraction of the moment scale count as stationary.
constexpr double kStationaryTol = 1e-13;
constexpr double kPoleTol = 1e-14;

void require_photon_number(int n, const char *context) {
    if (n < 1) {
        throw std::invalid_argument(fmt::format("{}: photon number n must be >= 1, got {}", context, n));
    }
}

double twin_j(int n) {
    return n - 0.5;
}

}  // namespace

SpinMoments spin_moments(const TwoModePureState &state) {
    const ModeCutoff &c = state.cutoff();
    const Eigen::VectorXcd &psi = state.amplitudes();
    Eigen::VectorXcd vx = schwinger(SchwingerComponent::jx, c).matrix() * psi;
    Eigen::VectorXcd vz = schwinger(SchwingerComponent::jz, c).matrix() * psi;
    SpinMoments m;
    m.jx = psi.dot(vx).real();
    m.jz = psi.dot(vz).real();
    m.jx_sq = vx.squaredNorm();
    m.jz_sq = vz.squaredNorm();
    m.anticommutator_xz = 2 * vx.dot(vz).real();
    return m;
}

SpinMoments spin_moments(const TwoModeDensity &rho) {
    const ModeCutoff &c = rho.cutoff();
    TwoModeOperator jx = schwinger(SchwingerComponent::jx, c);
    TwoModeOperator jz = schwinger(SchwingerComponent::jz, c);
    SpinMoments m;
    m.jx = real_expectation(rho, jx);
    m.jz = real_expectation(rho, jz);
    m.jx_sq = real_expectation(rho, jx * jx);
    m.jz_sq = real_expectation(rho, jz * jz);
    m.anticommutator_xz = real_expectation(rho, jx * jz + jz * jx);
    return m;
}

SpinMoments spin_moments(const InputState &state) {
    return std::visit([](const auto &s) { return spin_moments(s); }, state);
}

double fringe(const InputState &state, double phi) {
    TwoModeOperator jz_out = mzi_jz_out(phi, cutoff_of(state));
    return std::visit([&](const auto &s) { return real_expectation(s, jz_out); }, state);
}

double fringe(const SpinMoments &m, double phi) {
    return -std::sin(phi) * m.jx + std::cos(phi) * m.jz;
}

double fringe_slope(const SpinMoments &m, double phi) {
    return -std::cos(phi) * m.jx - std::sin(phi) * m.jz;
}

double fringe_slope_finite_difference(const InputState &state, double phi, double step) {
    if (!(step > 0)) {
        throw std::invalid_argument("fringe_slope_finite_difference: step must be positive");
    }
    return (fringe(state, phi + step) - fringe(state, phi - step)) / (2 * step);
}

double output_variance(const SpinMoments &m, double phi) {
    double s = std::sin(phi);
    double c = std::cos(phi);
    double second = s * s * m.jx_sq + c * c * m.jz_sq - s * c * m.anticommutator_xz;
    double mean = fringe(m, phi);
    double var = second - mean * mean;
    return var < 0 ? 0.0 : var;
}

PhasePoint phase_point(const SpinMoments &m, double phi) {
    PhasePoint p;
    p.phi = phi;
    p.mean_jz = fringe(m, phi);
    p.var_jz = output_variance(m, phi);
    double slope = fringe_slope(m, phi);
    double scale = std::max({std::abs(m.jx), std::abs(m.jz), 1.0});
    if (std::abs(slope) <= kStationaryTol * scale) {
        p.delta_phi = kInf;
    } else {
        p.delta_phi = std::sqrt(p.var_jz) / std::abs(slope);
    }
    return p;
}

double delta_phi_from_moments(const SpinMoments &m, double phi) {
    return phase_point(m, phi).delta_phi;
}

double phase_error_numeric(const InputState &state, double phi) {
    return delta_phi_from_moments(spin_moments(state), phi);
}

double analytic_delta_phi_pure(int n, double phi) {
    require_photon_number(n, "analytic_delta_phi_pure");
    double c = std::cos(phi);
    if (std::abs(c) <= kPoleTol) {
        throw std::domain_error(fmt::format("analytic_delta_phi_pure: pole at cos(phi) = 0 (phi = {})", phi));
    }
    double s = std::sin(phi);
    double j = twin_j(n);
    double jj = j * (j + 1);
    double radicand = jj * s * s + c * c - 0.75 * s * s;
    return std::sqrt(radicand) / (std::abs(c) * std::sqrt(jj + 0.25));
}

double analytic_fringe_pure(int n, double phi) {
    require_photon_number(n, "analytic_fringe_pure");
    double j = twin_j(n);
    return -0.5 * std::sin(phi) * std::sqrt(j * (j + 1) + 0.25);
}

double analytic_jz_sq_pure(int n, double phi) {
    require_photon_number(n, "analytic_jz_sq_pure");
    double j = twin_j(n);
    double s = std::sin(phi);
    double c = std::cos(phi);
    return (j * (j + 1) - 0.25) * s * s / 2 + c * c / 4;
}

LossyMoments lossy_moments(int n, const LossSpec &loss, double phi) {
    require_photon_number(n, "lossy_moments");
    double t1 = loss.t1();
    double t2 = loss.t2();
    double r1 = loss.r1();
    double r2 = loss.r2();
    double s = std::sin(phi);
    double c = std::cos(phi);
    double nd = n;
    LossyMoments m;
    m.mean_jz = -0.5 * (nd * t1 * t2 * s + (nd - 0.5) * loss.c4() * c);
    m.jz_sq_first = 0.25 * (nd * (nd - 1) * loss.c4() * loss.c4() + 0.5 * (std::pow(t1, 4) + std::pow(t2, 4)) +
                            0.5 * nd * (t1 * r1 * r1 + t2 * r2 * r2));
    m.jz_sq_second = 0.25 * ((nd - 0.5) * loss.c1() + 2 * t1 * t1 * t2 * t2 * nd * (nd - 1));
    m.anticommutator_xz = 0.5 * nd * ((2 * nd - 1) * loss.c2() * loss.c4() + loss.c2() * (r1 * r1 - r2 * r2));
    return m;
}

SpinMoments lossy_input_moments(int n, const LossSpec &loss) {
    require_photon_number(n, "lossy_input_moments");
    // Binomial thinning: <n_a> = t1^2 (n - 1/2), <n_a(n_a - 1)> = t1^4 (n - 1)^2 averaged
    // over the two branches, and only the |n,n-1><n-1,n| coherence survives in J_x.
    double nd = n;
    double e1 = loss.t1() * loss.t1();
    double e2 = loss.t2() * loss.t2();
    SpinMoments m;
    m.jz = 0.5 * (nd - 0.5) * (e1 - e2);
    m.jx = 0.5 * nd * loss.c2();
    m.jz_sq = 0.25 * (nd * (nd - 1) * (e1 - e2) * (e1 - e2) + 0.5 * (e1 * e1 + e2 * e2) +
                      (nd - 0.5) * (e1 * (1 - e1) + e2 * (1 - e2)));
    m.jx_sq = 0.25 * (2 * e1 * e2 * nd * (nd - 1) + (nd - 0.5) * (e1 + e2));
    m.anticommutator_xz = 0.5 * nd * (nd - 1) * loss.c2() * (e1 - e2);
    return m;
}

SpinMoments lossy_input_moments_numeric(int n, const LossSpec &loss) {
    require_photon_number(n, "lossy_input_moments_numeric");
    ModeCutoff cutoff(n + 2);
    TwoModeDensity rho = TwoModeDensity::from_pure(subtracted_twin(n, HeraldSign::plus, cutoff));
    return spin_moments(apply_losses(loss, rho));
}

double lossy_delta_phi(int n, const LossSpec &loss, double phi) {
    require_photon_number(n, "lossy_delta_phi");
    double s = std::sin(phi);
    double c = std::cos(phi);
    double nd = n;
    double c1 = loss.c1();
    double c2 = loss.c2();
    double c3 = loss.c3();
    double c4 = loss.c4();
    double radicand = (c1 * c1 / 4 + c3 * nd / 2) * c * c + (c1 * (nd - 0.5) + nd * c2 * (nd * c2 - 4)) * s * s;
    double denominator = nd * c2 * c + (nd - 0.5) * c4 * s;
    if (std::abs(denominator) <= kPoleTol * std::max(1.0, nd)) {
        throw std::domain_error(fmt::format("lossy_delta_phi: vanishing denominator at phi = {}", phi));
    }
    if (radicand < 0) {
        throw std::domain_error(
            fmt::format("lossy_delta_phi: negative radicand {} at n = {}, phi = {}", radicand, n, phi));
    }
    return std::sqrt(radicand) / std::abs(denominator);
}

double lossy_delta_phi_limit(int n, double t) {
    require_photon_number(n, "lossy_delta_phi_limit");
    if (!(t > 0 && t <= 1)) {
        throw std::domain_error(fmt::format("lossy_delta_phi_limit: transmission must lie in (0, 1], got {}", t));
    }
    return std::sqrt(1 + n * (1 - t * t) / t) / (t * n);
}

double lossy_delta_phi_numeric(int n, const LossSpec &loss, double phi) {
    return delta_phi_from_moments(lossy_input_moments_numeric(n, loss), phi);
}

TippingPoint tipping_transmission(double n) {
    if (!(n >= 1)) {
        throw std::invalid_argument(fmt::format("tipping_transmission: n must be >= 1, got {}", n));
    }
    // Solve in u = 1 - t: n u (2 - u) = 1 - u, with g(0) = -1 < 0 < g(1) = n.
    auto g = [n](double u) { return n * u * (2 - u) - (1 - u); };
    std::uintmax_t max_iter = 200;
    auto bracket = boost::math::tools::toms748_solve(g, 0.0, 1.0, -1.0, n, boost::math::tools::eps_tolerance<double>(),
                                                     max_iter);
    double u = 0.5 * (bracket.first + bracket.second);
    TippingPoint tp;
    tp.loss = u;
    tp.transmission = 1 - u;
    double one_minus_t_sq = u * (2 - u);
    tp.residual = std::abs(n * one_minus_t_sq / (1 - u) - 1);
    tp.asymptote_gap = n * one_minus_t_sq - 1;
    return tp;
}

double qfi_pure(const TwoModePureState &state, const TwoModeOperator &generator) {
    require_same_cutoff(state.cutoff(), generator.cutoff(), "qfi_pure");
    if (!state.is_normalized()) {
        throw std::invalid_argument("qfi_pure: state is not normalized");
    }
    Eigen::VectorXcd g_psi = generator.matrix() * state.amplitudes();
    double mean = state.amplitudes().dot(g_psi).real();
    return 4 * (g_psi.squaredNorm() - mean * mean);
}

double qfi_pure(const TwoModeDensity &rho, const TwoModeOperator &generator) {
    double purity = rho.purity();
    if (std::abs(purity - 1) > kNormTol) {
        throw std::invalid_argument(
            fmt::format("qfi_pure: mixed state (purity {}) is outside the supported pure-state QFI", purity));
    }
    auto components = spectral_components(rho);
    return qfi_pure(components.front().state, generator);
}

double mixture_delta_phi(const MixtureCoefficients &coefficients, double phi) {
    double c = std::cos(phi);
    if (std::abs(c) <= kPoleTol) {
        throw std::domain_error(fmt::format("mixture_delta_phi: pole at cos(phi) = 0 (phi = {})", phi));
    }
    double s = std::sin(phi);
    double amplitude = 0;
    double second = 0;
    for (const auto &[twice_j, weight] : coefficients.diagonal_terms()) {
        double j = twice_j / 2.0;
        amplitude += weight * std::sqrt(j * (j + 1) + 0.25);
        second += weight * (j * (j + 1) - 0.25);
    }
    double radicand = c * c / 4 + s * s / 2 * second - s * s / 4 * amplitude * amplitude;
    return std::sqrt(radicand) / std::abs(c / 2 * amplitude);
}

double mixture_delta_phi_min(const MixtureCoefficients &coefficients) {
    double amplitude = 0;
    for (const auto &[twice_j, weight] : coefficients.diagonal_terms()) {
        double j = twice_j / 2.0;
        amplitude += weight * std::sqrt(j * (j + 1) + 0.25);
    }
    if (!(amplitude > 0)) {
        throw std::domain_error("mixture_delta_phi_min: coefficients carry no fringe amplitude");
    }
    return 1 / amplitude;
}

}  // namespace twinsub
