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

#ifndef TWINSUB_OPTICS_H
#define TWINSUB_OPTICS_H

#include <vector>

#include "twinsub/fock_core.h"

namespace twinsub {

/// Beam splitter with mixing angle theta: reflection r = sin(theta), transmission t = cos(theta).
struct BeamSplitterSpec {
    double theta;

    double r() const;
    double t() const;
};

/// Amplitude transmissions of the loss beam splitters on modes a (t1) and b (t2).
class LossSpec {
   public:
    LossSpec(double t1, double t2);
    static LossSpec symmetric(double t) {
        return LossSpec(t, t);
    }

    double t1() const {
        return t1_;
    }
    double t2() const {
        return t2_;
    }
    double r1() const;
    double r2() const;

    double c1() const;  // t1^2 + t2^2
    double c2() const;  // t1 t2
    double c3() const;  // t1 r1^2 + t2 r2^2
    double c4() const;  // t1^2 - t2^2

   private:
    double t1_;
    double t2_;
};

/// exp(i * angle * G) for a Hermitian G that conserves n_a + n_b.
///
/// Each total-photon-number sector is exponentiated exactly through its
/// eigen-decomposition, so nothing leaks between sectors. Throws
/// std::invalid_argument if G couples different sectors.
TwoModeOperator exp_i_sector_generator(const TwoModeOperator &generator, double angle);

/// exp[i theta (a^dag b + b^dag a)]. Either mode may play the role of the vacuum port.
TwoModeOperator beam_splitter_unitary(const BeamSplitterSpec &spec, ModeCutoff cutoff);

/// 1 + i theta (a^dag b + b^dag a). Not unitary; off by O(theta^2).
TwoModeOperator weak_bs_first_order(const BeamSplitterSpec &spec, ModeCutoff cutoff);

/// exp(i phi n_mode).
TwoModeOperator phase_shifter(double phi, Mode mode, ModeCutoff cutoff);

/// Schrodinger-picture Mach-Zehnder unitary
///   exp(-i pi/2 J_x) exp(i phi J_z) exp(i pi/2 J_x) = exp(-i phi J_y),
/// with exp(i phi J_z) realized as phase shifts +phi/2 on a and -phi/2 on b.
TwoModeOperator mzi_unitary(double phi, ModeCutoff cutoff);

/// Applies mzi_unitary. The rotation mixes a whole total-photon sector, so the
/// cutoff must hold every sector the state occupies: throws std::domain_error
/// when the state carries N > n_max photons. Use with_cutoff(ModeCutoff(N)) first.
TwoModePureState mzi_schrodinger(const TwoModePureState &state, double phi);
TwoModeDensity mzi_schrodinger(const TwoModeDensity &rho, double phi);

/// Heisenberg-picture output observable -sin(phi) J_x + cos(phi) J_z.
TwoModeOperator mzi_jz_out(double phi, ModeCutoff cutoff);

/// Kraus elements K_k = <k|_env U_BS |0>_env of a beam splitter with amplitude
/// transmission t coupling `mode` to a vacuum environment. k runs over 0..n_max.
std::vector<TwoModeOperator> loss_kraus_operators(double t, Mode mode, ModeCutoff cutoff);

/// max |sum_k K_k^dag K_k - 1|.
double kraus_completeness_error(const std::vector<TwoModeOperator> &kraus);

/// Amplitude damping of one mode: rho -> sum_k K_k rho K_k^dag.
TwoModeDensity loss_channel(double t, Mode mode, const TwoModeDensity &rho);
TwoModeDensity loss_channel(double t, Mode mode, const TwoModePureState &state);

/// loss_channel(t2, b) after loss_channel(t1, a).
TwoModeDensity apply_losses(const LossSpec &loss, const TwoModeDensity &rho);

}  // namespace twinsub

#endif
