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

#ifndef TWINSUB_SUBTRACTION_H
#define TWINSUB_SUBTRACTION_H

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "twinsub/fock_core.h"
#include "twinsub/four_mode.h"

namespace twinsub {

using InputState = std::variant<TwoModePureState, TwoModeDensity>;

TwoModeDensity to_density(const InputState &state);
const ModeCutoff &cutoff_of(const InputState &state);

enum class HeraldSign { plus, minus };
enum class SubtractionProtocol { bucket, coherent_plus, coherent_minus };

std::string to_string(SubtractionProtocol protocol);

/// Result of a heralded single-photon subtraction.
struct HeraldOutcome {
    InputState state;             // normalized; pure only for coherent heralds of pure inputs
    double herald_probability;    // probability that the heralding detector fires
    SubtractionProtocol protocol;
    double tap_theta;
    double discarded_weight;      // weight of the dropped two-photon tap events

    TwoModeDensity density() const {
        return to_density(state);
    }
};

/// Weak first-order taps exp-linearized as 1 + i theta (x^dag x' + x'^dag x) on a
/// then on b, starting from vacuum ancillas. Ancillas keep at most one photon each.
FourModePureState apply_weak_taps(const TwoModePureState &signal, double theta);

/// Ancilla-space unitary of the balanced mixer, restricted to the {0,1} x {0,1}
/// patterns: a -pi/2 phase on b' followed by a 50:50 beam splitter, so that
/// |10> heralds (a + b) and |01> heralds (a - b) acting on the signal.
Eigen::Matrix4cd balanced_ancilla_mixer();

/// Applies a pattern-space matrix; amplitude leaving the single-photon ancilla
/// space is dropped.
FourModePureState apply_ancilla_matrix(const FourModePureState &state, const Eigen::Matrix4cd &matrix);

/// Decohering protocol: both taps feed one detector. The conditioned state uses
/// the equal-weight POVM (|10><10| + |01><01|)/2 on the ancillas.
/// Throws std::domain_error when no photon can be tapped (vacuum input).
HeraldOutcome bucket_subtract(const InputState &input, double theta);

/// Coherent protocol: taps interfere on the balanced mixer before projective
/// detection of |10> (plus) or |01> (minus).
HeraldOutcome coherent_subtract(const InputState &input, double theta, HeraldSign sign);

/// (1/2)|n,n-1><n,n-1| + (1/2)|n-1,n><n-1,n|.
TwoModeDensity bucket_mixture(int n, ModeCutoff cutoff);

/// (|n,n-1> +/- |n-1,n>)/sqrt(2).
TwoModePureState subtracted_twin(int n, HeraldSign sign, ModeCutoff cutoff);

/// True when rho is supported only on |n,n><n',n'| elements.
bool is_twin_form(const TwoModeDensity &rho, double tol = 1e-12);

/// Coherently subtracted twin mixture written directly from rho_{n,n'}:
///   sum sqrt(n n') rho_{n,n'} |psi_n^{+/-}><psi_n'^{+/-}| / sum n rho_{n,n},
/// with |psi_n^{+/-}> = (|n-1,n> +/- |n,n-1>)/sqrt(2).
/// Throws std::invalid_argument for non-twin input.
TwoModeDensity subtracted_twin_mixture(const TwoModeDensity &twin_rho, HeraldSign sign);

/// Coefficients c_{j,j'} of a subtracted twin mixture, keyed by (2j, 2j') with j = n - 1/2.
struct MixtureCoefficients {
    std::map<std::pair<int, int>, cplx> entries;

    /// c_{j,j} (0 when absent).
    double diagonal(int twice_j) const;
    /// (2j, c_{j,j}) in increasing j.
    std::vector<std::pair<int, double>> diagonal_terms() const;
    double diagonal_sum() const;
    /// sum_j c_{j,j} (j + 1/2).
    double effective_photon_number() const;
};

/// Throws std::invalid_argument for non-twin input and std::domain_error when
/// sum n rho_{n,n} vanishes.
MixtureCoefficients mixture_coefficients(const TwoModeDensity &twin_rho);

}  // namespace twinsub

#endif
