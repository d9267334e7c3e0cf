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

#include "twinsub/four_mode.h"

#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace twinsub {

int ancilla_pattern(int n_ap, int n_bp) {
    if (n_ap < 0 || n_ap > 1 || n_bp < 0 || n_bp > 1) {
        throw std::out_of_range(
            fmt::format("ancilla occupation ({}, {}) outside the single-photon ancilla space", n_ap, n_bp));
    }
    return n_ap + 2 * n_bp;
}

int ancilla_n_ap(int pattern) {
    return pattern & 1;
}

int ancilla_n_bp(int pattern) {
    return (pattern >> 1) & 1;
}

FourModePureState::FourModePureState(ModeCutoff cutoff) : cutoff_(cutoff) {
    for (auto &b : branches_) {
        b = Eigen::VectorXcd::Zero(cutoff.dim());
    }
}

FourModePureState::FourModePureState(ModeCutoff cutoff, std::array<Eigen::VectorXcd, kAncillaPatterns> branches)
    : cutoff_(cutoff), branches_(std::move(branches)) {
    for (const auto &b : branches_) {
        if (b.size() != cutoff_.dim()) {
            throw std::invalid_argument("four-mode branch does not match the signal cutoff");
        }
    }
}

FourModePureState FourModePureState::product(const TwoModePureState &signal, int n_ap, int n_bp) {
    FourModePureState result(signal.cutoff());
    result.branches_[ancilla_pattern(n_ap, n_bp)] = signal.amplitudes();
    return result;
}

double FourModePureState::norm_squared() const {
    double total = 0;
    for (const auto &b : branches_) {
        total += b.squaredNorm();
    }
    return total;
}

AncillaPovm AncillaPovm::identity() {
    return AncillaPovm{{1, 1, 1, 1}};
}

AncillaPovm AncillaPovm::projector(int n_ap, int n_bp) {
    AncillaPovm povm{{0, 0, 0, 0}};
    povm.weights[ancilla_pattern(n_ap, n_bp)] = 1;
    return povm;
}

ConditionedDensity partial_trace_pair(const FourModePureState &state, const AncillaPovm &povm) {
    const auto &cutoff = state.cutoff();
    SparseMatrix acc(cutoff.dim(), cutoff.dim());
    double probability = 0;
    for (int p = 0; p < kAncillaPatterns; ++p) {
        double w = povm.weights[p];
        if (w < 0) {
            throw std::invalid_argument("POVM weights must be non-negative");
        }
        if (w == 0) {
            continue;
        }
        const auto &branch = state.branch(p);
        double weight = w * branch.squaredNorm();
        if (weight == 0) {
            continue;
        }
        probability += weight;
        acc += w * sparse_outer(branch, branch);
    }
    if (!(probability > std::numeric_limits<double>::min())) {
        throw std::domain_error("conditioning event has zero probability; the state cannot be heralded");
    }
    return ConditionedDensity{TwoModeDensity(cutoff, acc / probability), probability};
}

}  // namespace twinsub
