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

#ifndef TWINSUB_CATALOG_H
#define TWINSUB_CATALOG_H

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twinsub/fock_core.h"
#include "twinsub/subtraction.h"

namespace twinsub {

enum class StateKind {
    fock_vacuum,
    coherent_vacuum,
    coherent_squeezed,
    twin_fock,
    fraternal_twin,
    noon,
    ymck,
    subtracted_twin,
    opo_mixture,
};

std::string to_string(StateKind kind);
/// Accepts the snake_case names above. Throws std::invalid_argument otherwise.
StateKind parse_state_kind(std::string_view name);

std::string to_string(HeraldSign sign);
/// Accepts "+", "-", "plus" and "minus".
HeraldSign parse_herald_sign(std::string_view text);

/// One user-supplied twin-mixture element rho_{n,n'}.
struct TwinTableEntry {
    int n;
    int n_prime;
    cplx value;
};

/// Parameters of a catalog state plus its cutoff policy.
///
/// The squeezed vacuum uses the real, positive squeezing parameter r in
///   |0,r> = (cosh r)^{-1/2} sum_k (-tanh r)^k sqrt((2k)!) / (2^k k!) |2k>,
/// which, with a real positive alpha, squeezes the quadrature that sets the
/// interferometric noise.
struct InputStateSpec {
    StateKind kind = StateKind::twin_fock;
    int n = 1;
    cplx alpha = 0;
    double squeezing = 0;
    HeraldSign sign = HeraldSign::plus;
    double thermal_x = 0.5;
    std::vector<TwinTableEntry> twin_table;  // overrides thermal_x when nonempty

    std::optional<int> n_max;  // explicit cutoff, else sized automatically
    double tail_tolerance = 1e-12;
    int max_n_max = 400;  // memory budget on the per-mode cutoff

    static InputStateSpec fock_vacuum(int n);
    static InputStateSpec coherent_vacuum(cplx alpha);
    static InputStateSpec coherent_squeezed(cplx alpha, double r);
    static InputStateSpec twin_fock(int n);
    static InputStateSpec fraternal_twin(int n);
    static InputStateSpec noon(int n);
    static InputStateSpec ymck(int n);
    static InputStateSpec subtracted_twin(int n, HeraldSign sign);
    static InputStateSpec opo_thermal(double x);
    static InputStateSpec opo_table(std::vector<TwinTableEntry> table);

    /// Throws std::invalid_argument naming the offending parameter.
    void validate() const;
};

/// Cutoff chosen by the policy: n + 2 for finite states, a discarded tail below
/// tail_tolerance for coherent, squeezed and thermal states. Throws
/// std::length_error when the cutoff exceeds max_n_max.
ModeCutoff auto_cutoff(const InputStateSpec &spec);

InputState build(const InputStateSpec &spec);

/// Reference fringe a cos(phi) + b sin(phi) in the observable the table quotes.
struct FringeReference {
    std::string formula;
    std::string observable;  // "J_z" or "N_a-N_b"
    /// "exact", "leading_order", "magnitude" (only the scale is claimed) or "none".
    std::string comparison = "exact";
    double cos_coefficient = 0;
    double sin_coefficient = 0;

    double at(double phi) const;
};

struct StateDescription {
    std::string label;
    std::optional<int> table_row;
    int n_max;
    double mean_photons;
    std::vector<int> twice_j_support;
    double purity;
    std::optional<double> delta_phi_reference;
    std::string delta_phi_formula;
    FringeReference fringe_reference;
};

StateDescription describe(const InputStateSpec &spec);
StateDescription describe(const InputStateSpec &spec, const InputState &built);

}  // namespace twinsub

#endif
