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

#ifndef TWINSUB_ESTIMATION_H
#define TWINSUB_ESTIMATION_H

#include "twinsub/fock_core.h"
#include "twinsub/optics.h"
#include "twinsub/subtraction.h"

namespace twinsub {

/// Input-state moments that fix every output moment of J_z^out(phi).
struct SpinMoments {
    double jx;
    double jz;
    double jx_sq;
    double jz_sq;
    double anticommutator_xz;  // <J_x J_z + J_z J_x>
};

SpinMoments spin_moments(const TwoModePureState &state);
SpinMoments spin_moments(const TwoModeDensity &rho);
SpinMoments spin_moments(const InputState &state);

/// One point of a phase sweep. delta_phi is +infinity where the fringe is stationary.
struct PhasePoint {
    double phi;
    double mean_jz;
    double var_jz;
    double delta_phi;
};

/// <J_z^out(phi)>, evaluated against the Heisenberg-picture observable.
double fringe(const InputState &state, double phi);

double fringe(const SpinMoments &m, double phi);
/// d<J_z^out>/dphi = -cos(phi) <J_x> - sin(phi) <J_z>.
double fringe_slope(const SpinMoments &m, double phi);
/// Central difference of fringe(state, .) with the given step.
double fringe_slope_finite_difference(const InputState &state, double phi, double step = 1e-5);
/// Var(J_z^out(phi)), clamped at zero.
double output_variance(const SpinMoments &m, double phi);

PhasePoint phase_point(const SpinMoments &m, double phi);

/// Error-propagation phase error Delta J_z^out / |d<J_z^out>/dphi|.
double phase_error_numeric(const InputState &state, double phi);

/// Closed form for (|n,n-1> +/- |n-1,n>)/sqrt(2) with j = n - 1/2:
///   sqrt(j(j+1) sin^2 + cos^2 - 3/4 sin^2) / (cos(phi) sqrt(j(j+1) + 1/4)).
/// Throws std::domain_error at the cos(phi) = 0 pole.
double analytic_delta_phi_pure(int n, double phi);
/// -(sin(phi)/2) sqrt(j(j+1) + 1/4), j = n - 1/2.
double analytic_fringe_pure(int n, double phi);
/// [j(j+1) - 1/4] sin^2(phi)/2 + cos^2(phi)/4, j = n - 1/2.
double analytic_jz_sq_pure(int n, double phi);

/// The three lossy moment expressions for the subtracted twin state, as printed.
/// The squared moment appears in two non-equivalent forms.
struct LossyMoments {
    double mean_jz;
    double jz_sq_first;
    double jz_sq_second;
    double anticommutator_xz;
};

LossyMoments lossy_moments(int n, const LossSpec &loss, double phi);

/// Moments of the subtracted twin state after the loss channels (t1 on a, t2 on b),
/// from normally ordered expectations under binomial thinning.
SpinMoments lossy_input_moments(int n, const LossSpec &loss);

/// Same moments from the Kraus channels applied to the Fock-space state.
SpinMoments lossy_input_moments_numeric(int n, const LossSpec &loss);

/// Phase error assembled from arbitrary moments; +infinity at stationary points.
double delta_phi_from_moments(const SpinMoments &m, double phi);

/// The c1..c4 closed form for the lossy phase error.
/// Throws std::domain_error when its denominator vanishes or its radicand is negative.
double lossy_delta_phi(int n, const LossSpec &loss, double phi);

/// Symmetric-loss small-phase limit (1/(t n)) sqrt(1 + n (1 - t^2)/t).
double lossy_delta_phi_limit(int n, double t);

/// Kraus-channel phase error of the lossy subtracted twin state.
double lossy_delta_phi_numeric(int n, const LossSpec &loss, double phi);

struct TippingPoint {
    double transmission;   // t* solving n (1 - t^2) / t = 1
    double loss;           // 1 - t*, solved for directly to avoid cancellation
    double residual;       // |n (1 - t*^2) / t* - 1|
    double asymptote_gap;  // n (1 - t*^2) - 1, which tends to 0 as 1/n
};

TippingPoint tipping_transmission(double n);

/// 4 Var(generator). The density overload rejects mixed states.
double qfi_pure(const TwoModePureState &state, const TwoModeOperator &generator);
double qfi_pure(const TwoModeDensity &rho, const TwoModeOperator &generator);

inline double quantum_cramer_rao_bound(double qfi) {
    return 1 / std::sqrt(qfi);
}

/// Phase error of a coherently subtracted twin mixture from its diagonal coefficients.
/// Throws std::domain_error at cos(phi) = 0.
double mixture_delta_phi(const MixtureCoefficients &coefficients, double phi);
/// 1 / sum_j c_{j,j} sqrt(j(j+1) + 1/4).
double mixture_delta_phi_min(const MixtureCoefficients &coefficients);

}  // namespace twinsub

#endif
