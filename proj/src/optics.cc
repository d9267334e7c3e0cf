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

#include "twinsub/optics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/binomial.hpp>
#include <fmt/format.h>

namespace twinsub {

namespace {

using Triplet = Eigen::Triplet<cplx>;

void check_transmission(double t, const char *name) {
    if (!(t >= 0 && t <= 1)) {
        throw std::invalid_argument(fmt::format("transmission {}={} outside [0, 1]", name, t));
    }
}

double complement(double t) {
    return std::sqrt(std::max(0.0, 1 - t * t));
}

// Basis indices of the sector n_a + n_b = total, ordered by n_a.
std::vector<Eigen::Index> sector_indices(int total, const ModeCutoff &cutoff) {
    std::vector<Eigen::Index> indices;
    int lo = std::max(0, total - cutoff.n_max());
    int hi = std::min(total, cutoff.n_max());
    for (int n_a = lo; n_a <= hi; ++n_a) {
        indices.push_back(cutoff.index(n_a, total - n_a));
    }
    return indices;
}

void require_full_sectors(int total, const ModeCutoff &cutoff) {
    if (total > cutoff.n_max()) {
        throw std::domain_error(fmt::format(
            "mzi_schrodinger: state holds {} photons but n_max={} truncates that sector; embed it with n_max >= {}",
            total, cutoff.n_max(), total));
    }
}

}  // namespace

double BeamSplitterSpec::r() const {
    return std::sin(theta);
}

double BeamSplitterSpec::t() const {
    return std::cos(theta);
}

LossSpec::LossSpec(double t1, double t2) : t1_(t1), t2_(t2) {
    check_transmission(t1, "t1");
    check_transmission(t2, "t2");
}

double LossSpec::r1() const {
    return complement(t1_);
}

double LossSpec::r2() const {
    return complement(t2_);
}

double LossSpec::c1() const {
    return t1_ * t1_ + t2_ * t2_;
}

double LossSpec::c2() const {
    return t1_ * t2_;
}

double LossSpec::c3() const {
    return t1_ * r1() * r1() + t2_ * r2() * r2();
}

double LossSpec::c4() const {
    return t1_ * t1_ - t2_ * t2_;
}

TwoModeOperator exp_i_sector_generator(const TwoModeOperator &generator, double angle) {
    const auto &cutoff = generator.cutoff();
    const auto &g = generator.matrix();
    for (int k = 0; k < g.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(g, k); it; ++it) {
            int row_total = cutoff.n_a_of(it.row()) + cutoff.n_b_of(it.row());
            int col_total = cutoff.n_a_of(it.col()) + cutoff.n_b_of(it.col());
            if (row_total != col_total) {
                throw std::invalid_argument("generator couples different total-photon-number sectors");
            }
        }
    }

    std::vector<Triplet> triplets;
    for (int total = 0; total <= 2 * cutoff.n_max(); ++total) {
        auto indices = sector_indices(total, cutoff);
        auto size = static_cast<Eigen::Index>(indices.size());
        Eigen::MatrixXcd block(size, size);
        for (Eigen::Index r = 0; r < size; ++r) {
            for (Eigen::Index c = 0; c < size; ++c) {
                block(r, c) = g.coeff(indices[r], indices[c]);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver((block + block.adjoint()) / 2.0);
        Eigen::VectorXcd phases(size);
        for (Eigen::Index k = 0; k < size; ++k) {
            phases[k] = std::polar(1.0, angle * solver.eigenvalues()[k]);
        }
        const auto &v = solver.eigenvectors();
        Eigen::MatrixXcd u = v * phases.asDiagonal() * v.adjoint();
        for (Eigen::Index r = 0; r < size; ++r) {
            for (Eigen::Index c = 0; c < size; ++c) {
                if (u(r, c) != cplx{0}) {
                    triplets.emplace_back(indices[r], indices[c], u(r, c));
                }
            }
        }
    }
    SparseMatrix m(cutoff.dim(), cutoff.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return TwoModeOperator(cutoff, std::move(m));
}

TwoModeOperator beam_splitter_unitary(const BeamSplitterSpec &spec, ModeCutoff cutoff) {
    // a^dag b + b^dag a = 2 J_x.
    return exp_i_sector_generator(schwinger(SchwingerComponent::jx, cutoff) * 2.0, spec.theta);
}

TwoModeOperator weak_bs_first_order(const BeamSplitterSpec &spec, ModeCutoff cutoff) {
    auto coupling = schwinger(SchwingerComponent::jx, cutoff) * 2.0;
    return TwoModeOperator::identity(cutoff) + coupling * cplx{0, spec.theta};
}

TwoModeOperator phase_shifter(double phi, Mode mode, ModeCutoff cutoff) {
    std::vector<Triplet> triplets;
    triplets.reserve(cutoff.dim());
    for (Eigen::Index k = 0; k < cutoff.dim(); ++k) {
        int n = mode == Mode::a ? cutoff.n_a_of(k) : cutoff.n_b_of(k);
        triplets.emplace_back(k, k, std::polar(1.0, phi * n));
    }
    SparseMatrix m(cutoff.dim(), cutoff.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return TwoModeOperator(cutoff, std::move(m));
}

TwoModeOperator mzi_unitary(double phi, ModeCutoff cutoff) {
    constexpr double quarter_turn = std::numbers::pi / 2;
    auto jx = schwinger(SchwingerComponent::jx, cutoff);
    auto enter = exp_i_sector_generator(jx, quarter_turn);
    auto leave = exp_i_sector_generator(jx, -quarter_turn);
    auto arms = phase_shifter(phi / 2, Mode::a, cutoff) * phase_shifter(-phi / 2, Mode::b, cutoff);
    return leave * arms * enter;
}

TwoModePureState mzi_schrodinger(const TwoModePureState &state, double phi) {
    require_full_sectors(state.max_total_photons(), state.cutoff());
    return mzi_unitary(phi, state.cutoff()).apply(state);
}

TwoModeDensity mzi_schrodinger(const TwoModeDensity &rho, double phi) {
    require_full_sectors(rho.max_total_photons(), rho.cutoff());
    return mzi_unitary(phi, rho.cutoff()).conjugate(rho);
}

TwoModeOperator mzi_jz_out(double phi, ModeCutoff cutoff) {
    return schwinger(SchwingerComponent::jx, cutoff) * -std::sin(phi) +
           schwinger(SchwingerComponent::jz, cutoff) * std::cos(phi);
}

std::vector<TwoModeOperator> loss_kraus_operators(double t, Mode mode, ModeCutoff cutoff) {
    check_transmission(t, "t");
    const double r = complement(t);
    const cplx i_r{0, r};
    const int n_max = cutoff.n_max();
    std::vector<TwoModeOperator> kraus;
    kraus.reserve(n_max + 1);
    for (int k = 0; k <= n_max; ++k) {
        std::vector<Triplet> triplets;
        for (int n_a = 0; n_a <= n_max; ++n_a) {
            for (int n_b = 0; n_b <= n_max; ++n_b) {
                int n = mode == Mode::a ? n_a : n_b;
                if (n < k) {
                    continue;
                }
                // <n-k, k| U_BS |n, 0>: k photons reflected into the environment.
                cplx element = std::sqrt(boost::math::binomial_coefficient<double>(n, k)) * std::pow(t, n - k) *
                               std::pow(i_r, k);
                if (element == cplx{0}) {
                    continue;
                }
                int out_a = mode == Mode::a ? n_a - k : n_a;
                int out_b = mode == Mode::b ? n_b - k : n_b;
                triplets.emplace_back(cutoff.index(out_a, out_b), cutoff.index(n_a, n_b), element);
            }
        }
        SparseMatrix m(cutoff.dim(), cutoff.dim());
        m.setFromTriplets(triplets.begin(), triplets.end());
        kraus.emplace_back(cutoff, std::move(m));
    }
    return kraus;
}

double kraus_completeness_error(const std::vector<TwoModeOperator> &kraus) {
    if (kraus.empty()) {
        throw std::invalid_argument("empty Kraus set");
    }
    const auto &cutoff = kraus.front().cutoff();
    SparseMatrix sum(cutoff.dim(), cutoff.dim());
    for (const auto &k : kraus) {
        sum += SparseMatrix(k.matrix().adjoint() * k.matrix());
    }
    SparseMatrix id(cutoff.dim(), cutoff.dim());
    id.setIdentity();
    return max_abs_entry(SparseMatrix(sum - id));
}

TwoModeDensity loss_channel(double t, Mode mode, const TwoModeDensity &rho) {
    if (t == 1) {
        return rho;
    }
    const auto &cutoff = rho.cutoff();
    SparseMatrix out(cutoff.dim(), cutoff.dim());
    for (const auto &k : loss_kraus_operators(t, mode, cutoff)) {
        out += k.conjugate(rho).matrix();
    }
    return TwoModeDensity(cutoff, std::move(out));
}

TwoModeDensity loss_channel(double t, Mode mode, const TwoModePureState &state) {
    return loss_channel(t, mode, TwoModeDensity::from_pure(state));
}

TwoModeDensity apply_losses(const LossSpec &loss, const TwoModeDensity &rho) {
    return loss_channel(loss.t2(), Mode::b, loss_channel(loss.t1(), Mode::a, rho));
}

}  // namespace twinsub
