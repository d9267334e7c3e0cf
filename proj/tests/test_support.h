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

#ifndef TWINSUB_TESTS_TEST_SUPPORT_H
#define TWINSUB_TESTS_TEST_SUPPORT_H

#include <cstdint>
#include <random>

#include "twinsub/fock_core.h"

namespace twinsub::testing {

inline constexpr std::uint64_t kSeed = 0x5eed2026;

inline std::mt19937_64 make_rng(std::uint64_t salt = 0) {
    return std::mt19937_64(kSeed ^ (salt * 0x9e3779b97f4a7c15ULL));
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64 &rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Gaussian amplitudes on basis states with n_a + n_b <= max_total, normalized.
inline TwoModePureState random_pure_state(std::mt19937_64 &rng, ModeCutoff cutoff, int max_total) {
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(cutoff.dim());
    for (int na = 0; na <= cutoff.n_max(); ++na) {
        for (int nb = 0; nb + na <= max_total && nb <= cutoff.n_max(); ++nb) {
            psi(cutoff.index(na, nb)) = cplx(gauss(rng), gauss(rng));
        }
    }
    return TwoModePureState(cutoff, psi).normalized();
}

/// Convex mixture of `rank` random pure states.
inline TwoModeDensity random_density(std::mt19937_64 &rng, ModeCutoff cutoff, int max_total, int rank) {
    SparseMatrix m(cutoff.dim(), cutoff.dim());
    double total = 0;
    for (int k = 0; k < rank; ++k) {
        double w = uniform(rng, 0.1, 1.0);
        total += w;
        auto psi = random_pure_state(rng, cutoff, max_total);
        m += w * sparse_outer(psi.amplitudes(), psi.amplitudes());
    }
    return TwoModeDensity(cutoff, m / total);
}

/// Basis indices with n_a + n_b <= max_total.
inline std::vector<Eigen::Index> low_photon_indices(ModeCutoff cutoff, int max_total) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < cutoff.dim(); ++k) {
        if (cutoff.n_a_of(k) + cutoff.n_b_of(k) <= max_total) {
            idx.push_back(k);
        }
    }
    return idx;
}

/// Dense block of m on the given basis indices.
inline Eigen::MatrixXcd restrict(const Eigen::MatrixXcd &m, const std::vector<Eigen::Index> &idx) {
    Eigen::MatrixXcd out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out(i, j) = m(idx[i], idx[j]);
        }
    }
    return out;
}

}  // namespace twinsub::testing

#endif
