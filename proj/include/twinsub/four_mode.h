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

#ifndef TWINSUB_FOUR_MODE_H
#define TWINSUB_FOUR_MODE_H

#include <array>

#include "twinsub/fock_core.h"

namespace twinsub {

/// Number of ancilla configurations when each ancilla mode holds 0 or 1 photon.
inline constexpr int kAncillaPatterns = 4;

/// Pattern index of |n_a', n_b'> with n_a', n_b' in {0, 1}.
int ancilla_pattern(int n_ap, int n_bp);
int ancilla_n_ap(int pattern);
int ancilla_n_bp(int pattern);

/// Signal modes (a, b) on the usual truncated grid, tensored with two ancilla
/// modes (a', b') restricted to at most one photon each.
///
/// Stored as one signal vector per ancilla pattern:
///   |Psi> = sum_p |branch_p>_{ab} |p>_{a'b'}.
class FourModePureState {
   public:
    explicit FourModePureState(ModeCutoff cutoff);
    FourModePureState(ModeCutoff cutoff, std::array<Eigen::VectorXcd, kAncillaPatterns> branches);

    /// |signal> (x) |n_ap, n_bp>.
    static FourModePureState product(const TwoModePureState &signal, int n_ap, int n_bp);

    const ModeCutoff &cutoff() const {
        return cutoff_;
    }
    const Eigen::VectorXcd &branch(int pattern) const {
        return branches_[pattern];
    }
    const Eigen::VectorXcd &branch(int n_ap, int n_bp) const {
        return branches_[ancilla_pattern(n_ap, n_bp)];
    }
    const std::array<Eigen::VectorXcd, kAncillaPatterns> &branches() const {
        return branches_;
    }
    double norm_squared() const;

   private:
    ModeCutoff cutoff_;
    std::array<Eigen::VectorXcd, kAncillaPatterns> branches_;
};

/// A measurement element diagonal in the ancilla photon-number basis.
struct AncillaPovm {
    std::array<double, kAncillaPatterns> weights;

    static AncillaPovm identity();
    static AncillaPovm projector(int n_ap, int n_bp);
};

struct ConditionedDensity {
    TwoModeDensity state;  // unit trace
    double probability;    // Tr[(1 (x) Pi) |Psi><Psi|]
};

/// rho_ab = Tr_{a'b'}[(1 (x) Pi)|Psi><Psi|], renormalized.
/// Throws std::domain_error when the conditioning event has zero probability.
ConditionedDensity partial_trace_pair(const FourModePureState &state, const AncillaPovm &povm = AncillaPovm::identity());

}  // namespace twinsub

#endif
