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

#include "twinsub/fock_core.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace twinsub {

namespace {

using Triplet = Eigen::Triplet<cplx>;

SparseMatrix from_triplets(Eigen::Index dim, const std::vector<Triplet> &triplets) {
    SparseMatrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

// Basis indices touched by any nonzero of m, sorted.
std::vector<Eigen::Index> support_of(const SparseMatrix &m) {
    std::vector<char> used(m.rows(), 0);
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            if (it.value() != cplx{0}) {
                used[it.row()] = 1;
                used[it.col()] = 1;
            }
        }
    }
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (used[i]) {
            support.push_back(i);
        }
    }
    return support;
}

Eigen::MatrixXcd restrict_hermitian(const SparseMatrix &m, const std::vector<Eigen::Index> &support) {
    std::vector<Eigen::Index> position(m.rows(), -1);
    for (size_t k = 0; k < support.size(); ++k) {
        position[support[k]] = static_cast<Eigen::Index>(k);
    }
    auto n = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            auto r = position[it.row()];
            auto c = position[it.col()];
            if (r >= 0 && c >= 0) {
                block(r, c) += it.value();
            }
        }
    }
    return (block + block.adjoint()) / 2.0;
}

}  // namespace

ModeCutoff::ModeCutoff(int n_max) : n_max_(n_max) {
    if (n_max < 0) {
        throw std::invalid_argument(fmt::format("mode cutoff must be non-negative, got n_max={}", n_max));
    }
}

Eigen::Index ModeCutoff::index(int n_a, int n_b) const {
    if (n_a < 0 || n_a > n_max_) {
        throw std::out_of_range(fmt::format("photon number n_a={} outside [0, n_max={}]", n_a, n_max_));
    }
    if (n_b < 0 || n_b > n_max_) {
        throw std::out_of_range(fmt::format("photon number n_b={} outside [0, n_max={}]", n_b, n_max_));
    }
    return static_cast<Eigen::Index>(n_a) * (n_max_ + 1) + n_b;
}

void require_same_cutoff(const ModeCutoff &x, const ModeCutoff &y, const char *context) {
    if (!(x == y)) {
        throw std::invalid_argument(
            fmt::format("{}: cutoff mismatch (n_max={} vs n_max={})", context, x.n_max(), y.n_max()));
    }
}

SpinLabel jm_index(int n_a, int n_b) {
    if (n_a < 0 || n_b < 0) {
        throw std::invalid_argument("jm_index: photon numbers must be non-negative");
    }
    return SpinLabel{n_a + n_b, n_a - n_b};
}

// ---------------------------------------------------------------------------
// TwoModePureState

TwoModePureState::TwoModePureState(ModeCutoff cutoff, Eigen::VectorXcd amplitudes)
    : cutoff_(cutoff), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != cutoff_.dim()) {
        throw std::invalid_argument(fmt::format(
            "state has {} amplitudes but cutoff n_max={} needs {}", amplitudes_.size(), cutoff_.n_max(), cutoff_.dim()));
    }
}

cplx TwoModePureState::amplitude(int n_a, int n_b) const {
    return amplitudes_[cutoff_.index(n_a, n_b)];
}

bool TwoModePureState::is_normalized(double norm_tol) const {
    return std::abs(norm_squared() - 1) <= norm_tol;
}

TwoModePureState TwoModePureState::normalized() const {
    double norm = amplitudes_.norm();
    if (!(norm > 0) || !std::isfinite(norm)) {
        throw std::domain_error("cannot normalize a zero state vector");
    }
    return TwoModePureState(cutoff_, amplitudes_ / norm);
}

int TwoModePureState::max_total_photons(double tol) const {
    int result = 0;
    for (Eigen::Index k = 0; k < amplitudes_.size(); ++k) {
        if (std::abs(amplitudes_[k]) > tol) {
            result = std::max(result, cutoff_.n_a_of(k) + cutoff_.n_b_of(k));
        }
    }
    return result;
}

TwoModePureState TwoModePureState::with_cutoff(ModeCutoff cutoff, double tol) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(cutoff.dim());
    for (Eigen::Index k = 0; k < amplitudes_.size(); ++k) {
        int n_a = cutoff_.n_a_of(k);
        int n_b = cutoff_.n_b_of(k);
        if (cutoff.contains(n_a, n_b)) {
            out[cutoff.index(n_a, n_b)] = amplitudes_[k];
        } else if (std::abs(amplitudes_[k]) > tol) {
            throw std::out_of_range(fmt::format("with_cutoff: amplitude on |{},{}> does not fit n_max={}", n_a, n_b,
                                                cutoff.n_max()));
        }
    }
    return TwoModePureState(cutoff, std::move(out));
}

TwoModePureState basis_state(int n_a, int n_b, ModeCutoff cutoff) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff.dim());
    v[cutoff.index(n_a, n_b)] = 1;
    return TwoModePureState(cutoff, std::move(v));
}

TwoModePureState superposition(ModeCutoff cutoff, const std::vector<FockTerm> &terms) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff.dim());
    for (const auto &term : terms) {
        v[cutoff.index(term.n_a, term.n_b)] += term.amplitude;
    }
    return TwoModePureState(cutoff, std::move(v)).normalized();
}

// ---------------------------------------------------------------------------
// TwoModeDensity

TwoModeDensity::TwoModeDensity(ModeCutoff cutoff, SparseMatrix matrix) : cutoff_(cutoff), matrix_(std::move(matrix)) {
    if (matrix_.rows() != cutoff_.dim() || matrix_.cols() != cutoff_.dim()) {
        throw std::invalid_argument(fmt::format(
            "density is {}x{} but cutoff n_max={} needs {}x{}", matrix_.rows(), matrix_.cols(), cutoff_.n_max(),
            cutoff_.dim(), cutoff_.dim()));
    }
    matrix_.makeCompressed();
}

TwoModeDensity TwoModeDensity::from_pure(const TwoModePureState &state) {
    return TwoModeDensity(state.cutoff(), sparse_outer(state.amplitudes(), state.amplitudes()));
}

cplx TwoModeDensity::element(int row_n_a, int row_n_b, int col_n_a, int col_n_b) const {
    return matrix_.coeff(cutoff_.index(row_n_a, row_n_b), cutoff_.index(col_n_a, col_n_b));
}

cplx TwoModeDensity::trace() const {
    cplx t = 0;
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
            if (it.row() == it.col()) {
                t += it.value();
            }
        }
    }
    return t;
}

double TwoModeDensity::purity() const {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return matrix_.squaredNorm();
}

double TwoModeDensity::hermiticity_error() const {
    SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
    return max_abs_entry(diff);
}

double TwoModeDensity::min_eigenvalue() const {
    auto support = support_of(matrix_);
    if (support.empty()) {
        return 0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(restrict_hermitian(matrix_, support), Eigen::EigenvaluesOnly);
    double lowest = solver.eigenvalues().minCoeff();
    // Directions outside the support carry eigenvalue 0.
    if (static_cast<Eigen::Index>(support.size()) < cutoff_.dim()) {
        lowest = std::min(lowest, 0.0);
    }
    return lowest;
}

bool TwoModeDensity::is_physical(double tol) const {
    return hermiticity_error() <= tol && std::abs(trace() - cplx{1}) <= tol && min_eigenvalue() >= -tol;
}

int TwoModeDensity::max_total_photons(double tol) const {
    int result = 0;
    for (Eigen::Index k = 0; k < matrix_.rows(); ++k) {
        if (std::abs(matrix_.coeff(k, k)) > tol) {
            result = std::max(result, cutoff_.n_a_of(k) + cutoff_.n_b_of(k));
        }
    }
    return result;
}

TwoModeDensity TwoModeDensity::with_cutoff(ModeCutoff cutoff, double tol) const {
    std::vector<Eigen::Triplet<cplx>> triplets;
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
            int ra = cutoff_.n_a_of(it.row());
            int rb = cutoff_.n_b_of(it.row());
            int ca = cutoff_.n_a_of(it.col());
            int cb = cutoff_.n_b_of(it.col());
            if (cutoff.contains(ra, rb) && cutoff.contains(ca, cb)) {
                triplets.emplace_back(cutoff.index(ra, rb), cutoff.index(ca, cb), it.value());
            } else if (std::abs(it.value()) > tol) {
                throw std::out_of_range(fmt::format("with_cutoff: entry <{},{}|rho|{},{}> does not fit n_max={}", ra,
                                                    rb, ca, cb, cutoff.n_max()));
            }
        }
    }
    SparseMatrix m(cutoff.dim(), cutoff.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return TwoModeDensity(cutoff, std::move(m));
}

TwoModeDensity TwoModeDensity::normalized() const {
    double t = trace().real();
    if (!(t > 0) || !std::isfinite(t)) {
        throw std::domain_error("cannot normalize a density operator with vanishing trace");
    }
    return TwoModeDensity(cutoff_, matrix_ / t);
}

// ---------------------------------------------------------------------------
// TwoModeOperator

TwoModeOperator::TwoModeOperator(ModeCutoff cutoff, SparseMatrix matrix) : cutoff_(cutoff), matrix_(std::move(matrix)) {
    if (matrix_.rows() != cutoff_.dim() || matrix_.cols() != cutoff_.dim()) {
        throw std::invalid_argument(fmt::format(
            "operator is {}x{} but cutoff n_max={} needs {}x{}", matrix_.rows(), matrix_.cols(), cutoff_.n_max(),
            cutoff_.dim(), cutoff_.dim()));
    }
    matrix_.prune(cplx{0});
    matrix_.makeCompressed();
}

TwoModeOperator TwoModeOperator::identity(ModeCutoff cutoff) {
    SparseMatrix m(cutoff.dim(), cutoff.dim());
    m.setIdentity();
    return TwoModeOperator(cutoff, std::move(m));
}

cplx TwoModeOperator::element(int row_n_a, int row_n_b, int col_n_a, int col_n_b) const {
    return matrix_.coeff(cutoff_.index(row_n_a, row_n_b), cutoff_.index(col_n_a, col_n_b));
}

TwoModeOperator TwoModeOperator::adjoint() const {
    return TwoModeOperator(cutoff_, SparseMatrix(matrix_.adjoint()));
}

double TwoModeOperator::hermiticity_error() const {
    SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
    return max_abs_entry(diff);
}

double TwoModeOperator::unitarity_error(int max_total) const {
    const SparseMatrix p = total_photon_projector(max_total, cutoff_).matrix();
    SparseMatrix gram = p * SparseMatrix(matrix_.adjoint() * matrix_) * p;
    SparseMatrix diff = gram - p;
    return max_abs_entry(diff);
}

TwoModePureState TwoModeOperator::apply(const TwoModePureState &state) const {
    require_same_cutoff(cutoff_, state.cutoff(), "TwoModeOperator::apply");
    return TwoModePureState(cutoff_, matrix_ * state.amplitudes());
}

TwoModeDensity TwoModeOperator::conjugate(const TwoModeDensity &rho) const {
    require_same_cutoff(cutoff_, rho.cutoff(), "TwoModeOperator::conjugate");
    SparseMatrix left = matrix_ * rho.matrix();
    return TwoModeDensity(cutoff_, SparseMatrix(left * SparseMatrix(matrix_.adjoint())));
}

TwoModeOperator TwoModeOperator::operator*(const TwoModeOperator &other) const {
    require_same_cutoff(cutoff_, other.cutoff_, "operator product");
    return TwoModeOperator(cutoff_, SparseMatrix(matrix_ * other.matrix_));
}

TwoModeOperator TwoModeOperator::operator+(const TwoModeOperator &other) const {
    require_same_cutoff(cutoff_, other.cutoff_, "operator sum");
    return TwoModeOperator(cutoff_, SparseMatrix(matrix_ + other.matrix_));
}

TwoModeOperator TwoModeOperator::operator-(const TwoModeOperator &other) const {
    require_same_cutoff(cutoff_, other.cutoff_, "operator difference");
    return TwoModeOperator(cutoff_, SparseMatrix(matrix_ - other.matrix_));
}

TwoModeOperator TwoModeOperator::operator*(cplx scale) const {
    return TwoModeOperator(cutoff_, SparseMatrix(matrix_ * scale));
}

// ---------------------------------------------------------------------------
// Operator builders

TwoModeOperator ladder(Mode mode, LadderDirection direction, ModeCutoff cutoff) {
    std::vector<Triplet> triplets;
    triplets.reserve(cutoff.dim());
    int n_max = cutoff.n_max();
    for (int n_a = 0; n_a <= n_max; ++n_a) {
        for (int n_b = 0; n_b <= n_max; ++n_b) {
            int n = mode == Mode::a ? n_a : n_b;
            int target = direction == LadderDirection::lower ? n - 1 : n + 1;
            if (target < 0 || target > n_max) {
                continue;
            }
            double element = direction == LadderDirection::lower ? std::sqrt(double(n)) : std::sqrt(double(n + 1));
            int out_a = mode == Mode::a ? target : n_a;
            int out_b = mode == Mode::b ? target : n_b;
            triplets.emplace_back(cutoff.index(out_a, out_b), cutoff.index(n_a, n_b), element);
        }
    }
    return TwoModeOperator(cutoff, from_triplets(cutoff.dim(), triplets));
}

TwoModeOperator number_operator(Mode mode, ModeCutoff cutoff) {
    return ladder(mode, LadderDirection::raise, cutoff) * ladder(mode, LadderDirection::lower, cutoff);
}

TwoModeOperator total_number_operator(ModeCutoff cutoff) {
    return number_operator(Mode::a, cutoff) + number_operator(Mode::b, cutoff);
}

TwoModeOperator schwinger(SchwingerComponent which, ModeCutoff cutoff) {
    auto a = ladder(Mode::a, LadderDirection::lower, cutoff);
    auto b = ladder(Mode::b, LadderDirection::lower, cutoff);
    auto a_dag = ladder(Mode::a, LadderDirection::raise, cutoff);
    auto b_dag = ladder(Mode::b, LadderDirection::raise, cutoff);
    const cplx i{0, 1};
    switch (which) {
        case SchwingerComponent::jx:
            return (a_dag * b + b_dag * a) * 0.5;
        case SchwingerComponent::jy:
            return (a_dag * b - b_dag * a) * (-0.5 * i);
        case SchwingerComponent::jz:
            return (a_dag * a - b_dag * b) * 0.5;
        case SchwingerComponent::j2: {
            auto half_n = (a_dag * a + b_dag * b) * 0.5;
            return half_n * (half_n + TwoModeOperator::identity(cutoff));
        }
    }
    throw std::invalid_argument("unknown Schwinger component");
}

TwoModeOperator total_photon_projector(int max_total, ModeCutoff cutoff) {
    std::vector<Triplet> triplets;
    for (Eigen::Index k = 0; k < cutoff.dim(); ++k) {
        if (cutoff.n_a_of(k) + cutoff.n_b_of(k) <= max_total) {
            triplets.emplace_back(k, k, 1.0);
        }
    }
    return TwoModeOperator(cutoff, from_triplets(cutoff.dim(), triplets));
}

// ---------------------------------------------------------------------------
// Expectations and state utilities

cplx expectation(const TwoModePureState &state, const TwoModeOperator &op) {
    require_same_cutoff(state.cutoff(), op.cutoff(), "expectation");
    Eigen::VectorXcd image = op.matrix() * state.amplitudes();
    return state.amplitudes().dot(image);
}

cplx expectation(const TwoModeDensity &rho, const TwoModeOperator &op) {
    require_same_cutoff(rho.cutoff(), op.cutoff(), "expectation");
    // Tr(rho O) = sum_ij rho_ij O_ji.
    SparseMatrix op_t = op.matrix().transpose();
    return rho.matrix().cwiseProduct(op_t).sum();
}

namespace {

double checked_real(cplx value, double imag_tol) {
    if (std::abs(value.imag()) > imag_tol) {
        throw std::domain_error(fmt::format("expectation has imaginary residue {:.3e}", value.imag()));
    }
    return value.real();
}

}  // namespace

double real_expectation(const TwoModePureState &state, const TwoModeOperator &op, double imag_tol) {
    return checked_real(expectation(state, op), imag_tol);
}

double real_expectation(const TwoModeDensity &rho, const TwoModeOperator &op, double imag_tol) {
    return checked_real(expectation(rho, op), imag_tol);
}

std::vector<WeightedPureState> spectral_components(const TwoModeDensity &rho, double cutoff_weight) {
    auto support = support_of(rho.matrix());
    std::vector<WeightedPureState> result;
    if (support.empty()) {
        return result;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(restrict_hermitian(rho.matrix(), support));
    const auto &values = solver.eigenvalues();
    const auto &vectors = solver.eigenvectors();
    for (Eigen::Index k = values.size() - 1; k >= 0; --k) {
        if (values[k] <= cutoff_weight) {
            continue;
        }
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(rho.cutoff().dim());
        for (size_t s = 0; s < support.size(); ++s) {
            full[support[s]] = vectors(static_cast<Eigen::Index>(s), k);
        }
        result.push_back({values[k], TwoModePureState(rho.cutoff(), std::move(full))});
    }
    return result;
}

double trace_distance(const TwoModeDensity &rho, const TwoModeDensity &sigma) {
    require_same_cutoff(rho.cutoff(), sigma.cutoff(), "trace_distance");
    SparseMatrix diff = rho.matrix() - sigma.matrix();
    diff.prune(cplx{0});
    auto support = support_of(diff);
    if (support.empty()) {
        return 0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(restrict_hermitian(diff, support), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double fidelity(const TwoModePureState &psi, const TwoModePureState &phi) {
    require_same_cutoff(psi.cutoff(), phi.cutoff(), "fidelity");
    return std::norm(psi.amplitudes().dot(phi.amplitudes()));
}

double max_abs_entry(const SparseMatrix &m) {
    double result = 0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            result = std::max(result, std::abs(it.value()));
        }
    }
    return result;
}

SparseMatrix sparse_outer(const Eigen::VectorXcd &u, const Eigen::VectorXcd &v) {
    std::vector<Eigen::Index> nz_u;
    std::vector<Eigen::Index> nz_v;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (u[i] != cplx{0}) {
            nz_u.push_back(i);
        }
    }
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (v[j] != cplx{0}) {
            nz_v.push_back(j);
        }
    }
    std::vector<Triplet> triplets;
    triplets.reserve(nz_u.size() * nz_v.size());
    for (auto i : nz_u) {
        for (auto j : nz_v) {
            triplets.emplace_back(i, j, u[i] * std::conj(v[j]));
        }
    }
    SparseMatrix m(u.size(), v.size());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

}  // namespace twinsub
