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

#include "twinsub/subtraction.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "twinsub/optics.h"

namespace twinsub {

namespace {

using Triplet = Eigen::Triplet<cplx, Eigen::Index>;

void check_theta(double theta) {
    if (!(theta > 0) || !std::isfinite(theta)) {
        throw std::invalid_argument(fmt::format("tap angle theta must be positive, got {}", theta));
    }
}

// 1 + i theta (x^dag x' + x'^dag x) with x' restricted to {0, 1}.
FourModePureState apply_first_order_tap(const FourModePureState &state, Mode signal, double theta) {
    const auto &cutoff = state.cutoff();
    const SparseMatrix lower = ladder(signal, LadderDirection::lower, cutoff).matrix();
    const SparseMatrix raise = ladder(signal, LadderDirection::raise, cutoff).matrix();
    const cplx coupling{0, theta};
    auto out = state.branches();
    for (int p = 0; p < kAncillaPatterns; ++p) {
        const auto &branch = state.branch(p);
        if (branch.isZero(0)) {
            continue;
        }
        int n_ap = ancilla_n_ap(p);
        int n_bp = ancilla_n_bp(p);
        int &occupation = signal == Mode::a ? n_ap : n_bp;
        if (occupation == 0) {
            // x'^dag x: photon moves from the signal into the empty ancilla.
            occupation = 1;
            out[ancilla_pattern(n_ap, n_bp)] += coupling * (lower * branch);
        } else {
            // x^dag x': photon returns to the signal. x'^dag x would need a
            // second ancilla photon and is dropped with the linearization.
            occupation = 0;
            out[ancilla_pattern(n_ap, n_bp)] += coupling * (raise * branch);
        }
    }
    return FourModePureState(cutoff, std::move(out));
}

struct PureHerald {
    SparseMatrix conditioned;  // sum_p w_p |b_p><b_p|, unnormalized
    double povm_probability;
    double click_probability;
    double discarded_weight;
    Eigen::VectorXcd branch;  // coherent protocols only
};

PureHerald herald_pure(const TwoModePureState &signal, double theta, SubtractionProtocol protocol) {
    auto tapped = apply_weak_taps(signal, theta);
    double discarded = tapped.branch(1, 1).squaredNorm();
    const auto &cutoff = signal.cutoff();

    PureHerald result{SparseMatrix(cutoff.dim(), cutoff.dim()), 0, 0, discarded, {}};
    if (protocol == SubtractionProtocol::bucket) {
        AncillaPovm povm{{0, 0.5, 0.5, 0}};
        result.click_probability = tapped.branch(1, 0).squaredNorm() + tapped.branch(0, 1).squaredNorm();
        if (result.click_probability > 0) {
            auto conditioned = partial_trace_pair(tapped, povm);
            result.povm_probability = conditioned.probability;
            result.conditioned = conditioned.state.matrix() * conditioned.probability;
        }
        return result;
    }

    auto mixed = apply_ancilla_matrix(tapped, balanced_ancilla_mixer());
    int n_ap = protocol == SubtractionProtocol::coherent_plus ? 1 : 0;
    int n_bp = 1 - n_ap;
    result.branch = mixed.branch(n_ap, n_bp);
    result.click_probability = result.branch.squaredNorm();
    if (result.click_probability > 0) {
        auto conditioned = partial_trace_pair(mixed, AncillaPovm::projector(n_ap, n_bp));
        result.povm_probability = conditioned.probability;
        result.conditioned = conditioned.state.matrix() * conditioned.probability;
    }
    return result;
}

HeraldOutcome run_protocol(const InputState &input, double theta, SubtractionProtocol protocol) {
    check_theta(theta);
    if (const auto *pure = std::get_if<TwoModePureState>(&input)) {
        auto herald = herald_pure(*pure, theta, protocol);
        if (!(herald.click_probability > std::numeric_limits<double>::min())) {
            throw std::domain_error("unheraldable input: no photon can be tapped from the vacuum");
        }
        if (protocol == SubtractionProtocol::bucket) {
            TwoModeDensity state(pure->cutoff(), herald.conditioned / herald.povm_probability);
            return {state, herald.click_probability, protocol, theta, herald.discarded_weight};
        }
        TwoModePureState state = TwoModePureState(pure->cutoff(), herald.branch).normalized();
        return {state, herald.click_probability, protocol, theta, herald.discarded_weight};
    }

    const auto &rho = std::get<TwoModeDensity>(input);
    const auto &cutoff = rho.cutoff();
    double trace = rho.trace().real();
    SparseMatrix acc(cutoff.dim(), cutoff.dim());
    double povm_probability = 0;
    double click_probability = 0;
    double discarded = 0;
    for (const auto &component : spectral_components(rho)) {
        auto herald = herald_pure(component.state, theta, protocol);
        double w = component.weight / trace;
        if (herald.povm_probability > 0) {
            acc += herald.conditioned * w;
        }
        povm_probability += w * herald.povm_probability;
        click_probability += w * herald.click_probability;
        discarded += w * herald.discarded_weight;
    }
    if (!(povm_probability > std::numeric_limits<double>::min())) {
        throw std::domain_error("unheraldable input: no photon can be tapped from the vacuum");
    }
    TwoModeDensity state(cutoff, acc / povm_probability);
    return {state, click_probability, protocol, theta, discarded};
}

}  // namespace

TwoModeDensity to_density(const InputState &state) {
    if (const auto *pure = std::get_if<TwoModePureState>(&state)) {
        return TwoModeDensity::from_pure(*pure);
    }
    return std::get<TwoModeDensity>(state);
}

const ModeCutoff &cutoff_of(const InputState &state) {
    return std::visit([](const auto &s) -> const ModeCutoff & { return s.cutoff(); }, state);
}

std::string to_string(SubtractionProtocol protocol) {
    switch (protocol) {
        case SubtractionProtocol::bucket:
            return "bucket";
        case SubtractionProtocol::coherent_plus:
            return "coherent+";
        case SubtractionProtocol::coherent_minus:
            return "coherent-";
    }
    return "unknown";
}

FourModePureState apply_weak_taps(const TwoModePureState &signal, double theta) {
    auto state = FourModePureState::product(signal, 0, 0);
    state = apply_first_order_tap(state, Mode::a, theta);
    return apply_first_order_tap(state, Mode::b, theta);
}

Eigen::Matrix4cd balanced_ancilla_mixer() {
    // Built on a two-photon ancilla grid so the restriction is a plain submatrix.
    ModeCutoff ancilla(2);
    auto unitary = beam_splitter_unitary(BeamSplitterSpec{std::numbers::pi / 4}, ancilla) *
                   phase_shifter(-std::numbers::pi / 2, Mode::b, ancilla);
    Eigen::Matrix4cd m;
    for (int out = 0; out < kAncillaPatterns; ++out) {
        for (int in = 0; in < kAncillaPatterns; ++in) {
            m(out, in) = unitary.element(ancilla_n_ap(out), ancilla_n_bp(out), ancilla_n_ap(in), ancilla_n_bp(in));
        }
    }
    return m;
}

FourModePureState apply_ancilla_matrix(const FourModePureState &state, const Eigen::Matrix4cd &matrix) {
    std::array<Eigen::VectorXcd, kAncillaPatterns> out;
    for (int p = 0; p < kAncillaPatterns; ++p) {
        out[p] = Eigen::VectorXcd::Zero(state.cutoff().dim());
        for (int q = 0; q < kAncillaPatterns; ++q) {
            if (matrix(p, q) != cplx{0}) {
                out[p] += matrix(p, q) * state.branch(q);
            }
        }
    }
    return FourModePureState(state.cutoff(), std::move(out));
}

HeraldOutcome bucket_subtract(const InputState &input, double theta) {
    return run_protocol(input, theta, SubtractionProtocol::bucket);
}

HeraldOutcome coherent_subtract(const InputState &input, double theta, HeraldSign sign) {
    return run_protocol(
        input, theta, sign == HeraldSign::plus ? SubtractionProtocol::coherent_plus : SubtractionProtocol::coherent_minus);
}

TwoModeDensity bucket_mixture(int n, ModeCutoff cutoff) {
    if (n < 1) {
        throw std::domain_error("bucket mixture needs n >= 1");
    }
    std::vector<Triplet> triplets{
        {cutoff.index(n, n - 1), cutoff.index(n, n - 1), 0.5},
        {cutoff.index(n - 1, n), cutoff.index(n - 1, n), 0.5},
    };
    SparseMatrix m(cutoff.dim(), cutoff.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return TwoModeDensity(cutoff, std::move(m));
}

TwoModePureState subtracted_twin(int n, HeraldSign sign, ModeCutoff cutoff) {
    if (n < 1) {
        throw std::domain_error("photon-subtracted twin state needs n >= 1");
    }
    double s = sign == HeraldSign::plus ? 1 : -1;
    return superposition(cutoff, {{n, n - 1, 1.0}, {n - 1, n, s}});
}

bool is_twin_form(const TwoModeDensity &rho, double tol) {
    const auto &cutoff = rho.cutoff();
    const auto &m = rho.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            bool twin_row = cutoff.n_a_of(it.row()) == cutoff.n_b_of(it.row());
            bool twin_col = cutoff.n_a_of(it.col()) == cutoff.n_b_of(it.col());
            if (!(twin_row && twin_col) && std::abs(it.value()) > tol) {
                return false;
            }
        }
    }
    return true;
}

namespace {

void require_twin_form(const TwoModeDensity &rho, const char *context) {
    if (!is_twin_form(rho)) {
        throw std::invalid_argument(fmt::format("{}: input is not of the form sum rho_nn' |nn><n'n'|", context));
    }
}

// sum_n n rho_{n,n}
double subtraction_norm(const TwoModeDensity &rho) {
    const auto &cutoff = rho.cutoff();
    double norm = 0;
    for (int n = 1; n <= cutoff.n_max(); ++n) {
        norm += n * rho.element(n, n, n, n).real();
    }
    if (!(norm > 0)) {
        throw std::domain_error("unheraldable input: twin mixture has no photons to subtract");
    }
    return norm;
}

}  // namespace

TwoModeDensity subtracted_twin_mixture(const TwoModeDensity &twin_rho, HeraldSign sign) {
    require_twin_form(twin_rho, "subtracted_twin_mixture");
    const auto &cutoff = twin_rho.cutoff();
    double norm = subtraction_norm(twin_rho);
    double s = sign == HeraldSign::plus ? 1 : -1;
    std::vector<Triplet> triplets;
    const auto &m = twin_rho.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            int n = cutoff.n_a_of(it.row());
            int n_prime = cutoff.n_a_of(it.col());
            if (n == 0 || n_prime == 0 || it.value() == cplx{0}) {
                continue;
            }
            cplx weight = std::sqrt(double(n) * n_prime) * it.value() / (2 * norm);
            auto lo = cutoff.index(n - 1, n);
            auto hi = cutoff.index(n, n - 1);
            auto lo_p = cutoff.index(n_prime - 1, n_prime);
            auto hi_p = cutoff.index(n_prime, n_prime - 1);
            triplets.emplace_back(lo, lo_p, weight);
            triplets.emplace_back(lo, hi_p, s * weight);
            triplets.emplace_back(hi, lo_p, s * weight);
            triplets.emplace_back(hi, hi_p, weight);
        }
    }
    SparseMatrix out(cutoff.dim(), cutoff.dim());
    out.setFromTriplets(triplets.begin(), triplets.end());
    return TwoModeDensity(cutoff, std::move(out));
}

double MixtureCoefficients::diagonal(int twice_j) const {
    auto it = entries.find({twice_j, twice_j});
    return it == entries.end() ? 0.0 : it->second.real();
}

std::vector<std::pair<int, double>> MixtureCoefficients::diagonal_terms() const {
    std::vector<std::pair<int, double>> terms;
    for (const auto &[key, value] : entries) {
        if (key.first == key.second) {
            terms.emplace_back(key.first, value.real());
        }
    }
    return terms;
}

double MixtureCoefficients::diagonal_sum() const {
    double total = 0;
    for (const auto &[twice_j, c] : diagonal_terms()) {
        total += c;
    }
    return total;
}

double MixtureCoefficients::effective_photon_number() const {
    double total = 0;
    for (const auto &[twice_j, c] : diagonal_terms()) {
        total += c * (twice_j + 1) / 2.0;
    }
    return total;
}

MixtureCoefficients mixture_coefficients(const TwoModeDensity &twin_rho) {
    require_twin_form(twin_rho, "mixture_coefficients");
    const auto &cutoff = twin_rho.cutoff();
    double norm = subtraction_norm(twin_rho);
    MixtureCoefficients result;
    const auto &m = twin_rho.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            int n = cutoff.n_a_of(it.row());
            int n_prime = cutoff.n_a_of(it.col());
            if (n == 0 || n_prime == 0 || it.value() == cplx{0}) {
                continue;
            }
            // j + 1/2 = n.
            result.entries[{2 * n - 1, 2 * n_prime - 1}] = std::sqrt(double(n) * n_prime) * it.value() / norm;
        }
    }
    return result;
}

}  // namespace twinsub
