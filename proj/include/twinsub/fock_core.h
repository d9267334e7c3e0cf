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

#ifndef TWINSUB_FOCK_CORE_H
#define TWINSUB_FOCK_CORE_H

#include <complex>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace twinsub {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Default tolerance for normalization checks.
inline constexpr double kNormTol = 1e-10;

/// Largest photon number retained per mode. Both modes share the same cutoff,
/// so the two-mode Hilbert space has dimension (n_max + 1)^2.
///
/// Basis index of |n_a, n_b> is n_a * (n_max + 1) + n_b.
class ModeCutoff {
   public:
    explicit ModeCutoff(int n_max);

    int n_max() const {
        return n_max_;
    }
    int per_mode_dim() const {
        return n_max_ + 1;
    }
    Eigen::Index dim() const {
        return static_cast<Eigen::Index>(n_max_ + 1) * (n_max_ + 1);
    }
    bool contains(int n_a, int n_b) const {
        return n_a >= 0 && n_b >= 0 && n_a <= n_max_ && n_b <= n_max_;
    }
    /// Throws std::out_of_range naming the offending photon number and the bound.
    Eigen::Index index(int n_a, int n_b) const;
    int n_a_of(Eigen::Index k) const {
        return static_cast<int>(k / (n_max_ + 1));
    }
    int n_b_of(Eigen::Index k) const {
        return static_cast<int>(k % (n_max_ + 1));
    }

    bool operator==(const ModeCutoff &other) const = default;

   private:
    int n_max_;
};

void require_same_cutoff(const ModeCutoff &x, const ModeCutoff &y, const char *context);

enum class Mode { a, b };
enum class LadderDirection { lower, raise };
enum class SchwingerComponent { jx, jy, jz, j2 };

/// Angular momentum labels of |n_a, n_b>, stored doubled so half-integers stay exact.
struct SpinLabel {
    int twice_j;
    int twice_m;

    double j() const {
        return twice_j / 2.0;
    }
    double m() const {
        return twice_m / 2.0;
    }
    bool operator==(const SpinLabel &other) const = default;
};

SpinLabel jm_index(int n_a, int n_b);

class TwoModePureState {
   public:
    TwoModePureState(ModeCutoff cutoff, Eigen::VectorXcd amplitudes);

    const ModeCutoff &cutoff() const {
        return cutoff_;
    }
    const Eigen::VectorXcd &amplitudes() const {
        return amplitudes_;
    }
    cplx amplitude(int n_a, int n_b) const;
    double norm_squared() const {
        return amplitudes_.squaredNorm();
    }
    bool is_normalized(double norm_tol = kNormTol) const;

    /// Returns a unit-norm copy. Throws std::domain_error on a zero vector.
    TwoModePureState normalized() const;

    /// Largest total photon number carrying amplitude above `tol`.
    int max_total_photons(double tol = 0) const;

    /// The same vector on another cutoff. Throws std::out_of_range when an
    /// amplitude above `tol` would be dropped.
    TwoModePureState with_cutoff(ModeCutoff cutoff, double tol = 0) const;

   private:
    ModeCutoff cutoff_;
    Eigen::VectorXcd amplitudes_;
};

/// |n_a, n_b>. Throws std::out_of_range when either photon number exceeds the cutoff.
TwoModePureState basis_state(int n_a, int n_b, ModeCutoff cutoff);

struct FockTerm {
    int n_a;
    int n_b;
    cplx amplitude;
};

/// Normalized superposition of Fock terms.
TwoModePureState superposition(ModeCutoff cutoff, const std::vector<FockTerm> &terms);

class TwoModeDensity {
   public:
    TwoModeDensity(ModeCutoff cutoff, SparseMatrix matrix);

    static TwoModeDensity from_pure(const TwoModePureState &state);

    const ModeCutoff &cutoff() const {
        return cutoff_;
    }
    const SparseMatrix &matrix() const {
        return matrix_;
    }
    cplx element(int row_n_a, int row_n_b, int col_n_a, int col_n_b) const;
    cplx trace() const;
    double purity() const;
    double hermiticity_error() const;
    /// Smallest eigenvalue, computed on the support of the matrix.
    double min_eigenvalue() const;

    /// Hermitian, unit trace and positive, each within `tol`.
    bool is_physical(double tol = kNormTol) const;

    /// Unit-trace copy. Throws std::domain_error when the trace vanishes.
    TwoModeDensity normalized() const;

    /// Largest total photon number on the diagonal above `tol`.
    int max_total_photons(double tol = 0) const;

    /// The same operator on another cutoff. Throws std::out_of_range when an
    /// entry above `tol` would be dropped.
    TwoModeDensity with_cutoff(ModeCutoff cutoff, double tol = 0) const;

   private:
    ModeCutoff cutoff_;
    SparseMatrix matrix_;
};

class TwoModeOperator {
   public:
    TwoModeOperator(ModeCutoff cutoff, SparseMatrix matrix);

    static TwoModeOperator identity(ModeCutoff cutoff);

    const ModeCutoff &cutoff() const {
        return cutoff_;
    }
    const SparseMatrix &matrix() const {
        return matrix_;
    }
    Eigen::MatrixXcd dense() const {
        return Eigen::MatrixXcd(matrix_);
    }
    cplx element(int row_n_a, int row_n_b, int col_n_a, int col_n_b) const;

    TwoModeOperator adjoint() const;
    double hermiticity_error() const;
    /// max |(U^dag U - 1)_{ij}| over basis states with total photon number <= max_total.
    double unitarity_error(int max_total) const;

    TwoModePureState apply(const TwoModePureState &state) const;
    /// O rho O^dag.
    TwoModeDensity conjugate(const TwoModeDensity &rho) const;

    TwoModeOperator operator*(const TwoModeOperator &other) const;
    TwoModeOperator operator+(const TwoModeOperator &other) const;
    TwoModeOperator operator-(const TwoModeOperator &other) const;
    TwoModeOperator operator*(cplx scale) const;

   private:
    ModeCutoff cutoff_;
    SparseMatrix matrix_;
};

inline TwoModeOperator operator*(cplx scale, const TwoModeOperator &op) {
    return op * scale;
}

/// Annihilation or creation operator of one mode. Raising out of n_max is dropped.
TwoModeOperator ladder(Mode mode, LadderDirection direction, ModeCutoff cutoff);
TwoModeOperator number_operator(Mode mode, ModeCutoff cutoff);
TwoModeOperator total_number_operator(ModeCutoff cutoff);
/// Schwinger spin components built from the ladder operators of modes a and b.
TwoModeOperator schwinger(SchwingerComponent which, ModeCutoff cutoff);

/// Projector onto basis states with n_a + n_b <= max_total.
TwoModeOperator total_photon_projector(int max_total, ModeCutoff cutoff);

cplx expectation(const TwoModePureState &state, const TwoModeOperator &op);
cplx expectation(const TwoModeDensity &rho, const TwoModeOperator &op);

/// Expectation of an observable. Throws std::domain_error when the imaginary
/// residue exceeds `imag_tol`.
double real_expectation(const TwoModePureState &state, const TwoModeOperator &op, double imag_tol = kNormTol);
double real_expectation(const TwoModeDensity &rho, const TwoModeOperator &op, double imag_tol = kNormTol);

/// One term of a spectral decomposition rho = sum_k weight_k |v_k><v_k|.
struct WeightedPureState {
    double weight;
    TwoModePureState state;
};

/// Eigen-decomposes rho restricted to its support; drops weights below `cutoff_weight`.
std::vector<WeightedPureState> spectral_components(const TwoModeDensity &rho, double cutoff_weight = 1e-15);

/// Half the trace norm of rho - sigma.
double trace_distance(const TwoModeDensity &rho, const TwoModeDensity &sigma);

/// |<psi|phi>|^2.
double fidelity(const TwoModePureState &psi, const TwoModePureState &phi);

double max_abs_entry(const SparseMatrix &m);

/// Sparse |u><v|, skipping exactly-zero entries.
SparseMatrix sparse_outer(const Eigen::VectorXcd &u, const Eigen::VectorXcd &v);

}  // namespace twinsub

#endif
