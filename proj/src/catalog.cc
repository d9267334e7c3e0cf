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

#include "twinsub/catalog.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace twinsub {

namespace {

constexpr std::array<std::pair<StateKind, const char *>, 9> kKindNames{{
    {StateKind::fock_vacuum, "fock_vacuum"},
    {StateKind::coherent_vacuum, "coherent_vacuum"},
    {StateKind::coherent_squeezed, "coherent_squeezed"},
    {StateKind::twin_fock, "twin_fock"},
    {StateKind::fraternal_twin, "fraternal_twin"},
    {StateKind::noon, "noon"},
    {StateKind::ymck, "ymck"},
    {StateKind::subtracted_twin, "subtracted_twin"},
    {StateKind::opo_mixture, "opo_mixture"},
}};

// Support weights below this are ignored when listing j sectors.
constexpr double kSupportTol = 1e-14;

bool is_finite_kind(StateKind kind) {
    switch (kind) {
        case StateKind::coherent_vacuum:
        case StateKind::coherent_squeezed:
        case StateKind::opo_mixture:
            return false;
        default:
            return true;
    }
}

// Generates p_0, p_1, ... with p_k = next(k, p_{k-1}) until the terms are
// negligible against tol, then returns the smallest N with sum_{k > N} p_k < tol.
// `step` is the photon-number spacing between consecutive terms.
template <typename Next>
int tail_cutoff(double p0, Next next, int step, double mean, double tol, int budget, const char *what) {
    if (!(p0 > 0)) {
        throw std::length_error(fmt::format("{}: vacuum weight underflows; state too large for the cutoff budget", what));
    }
    std::vector<double> p{p0};
    for (int k = 1;; ++k) {
        double pk = next(k, p.back());
        p.push_back(pk);
        if (step * k > mean && pk < tol * 1e-6) {
            break;
        }
        if (step * k > 4 * budget + 64) {
            throw std::length_error(
                fmt::format("{}: tail does not fall below {} within the cutoff budget {}", what, tol, budget));
        }
    }
    double tail = 0;
    int k = static_cast<int>(p.size()) - 1;
    while (k > 0 && tail + p[k] < tol) {
        tail += p[k];
        --k;
    }
    return step * k;
}

int coherent_cutoff(cplx alpha, double tol, int budget) {
    double mean = std::norm(alpha);
    return tail_cutoff(
        std::exp(-mean), [mean](int k, double prev) { return prev * mean / k; }, 1, mean, tol, budget,
        "coherent state");
}

// The squeezed vacuum only populates even photon numbers 2k.
int squeezed_cutoff(double r, double tol, int budget) {
    double th2 = std::tanh(r) * std::tanh(r);
    double mean = std::sinh(r) * std::sinh(r);
    return tail_cutoff(
        1 / std::cosh(r), [th2](int k, double prev) { return prev * th2 * (2.0 * k - 1) / (2.0 * k); }, 2, mean, tol,
        budget, "squeezed vacuum");
}

int thermal_cutoff(double x, double tol, int budget) {
    // Tail beyond N of (1 - x) x^n is x^{N+1}.
    int n = 0;
    double tail = x;
    while (tail >= tol) {
        tail *= x;
        ++n;
        if (n > budget) {
            throw std::length_error(
                fmt::format("opo_mixture: thermal tail with x = {} exceeds the cutoff budget {}", x, budget));
        }
    }
    return n;
}

Eigen::VectorXcd coherent_amplitudes(cplx alpha, int n_max) {
    Eigen::VectorXcd c(n_max + 1);
    c(0) = std::exp(-std::norm(alpha) / 2);
    for (int k = 1; k <= n_max; ++k) {
        c(k) = c(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    }
    return c;
}

Eigen::VectorXcd squeezed_amplitudes(double r, int n_max) {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n_max + 1);
    s(0) = 1 / std::sqrt(std::cosh(r));
    double th = std::tanh(r);
    for (int k = 1; 2 * k <= n_max; ++k) {
        s(2 * k) = s(2 * k - 2) * (-th) * std::sqrt((2.0 * k - 1) / (2.0 * k));
    }
    return s;
}

TwoModePureState product_state(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b, ModeCutoff cutoff) {
    Eigen::VectorXcd psi(cutoff.dim());
    for (int na = 0; na <= cutoff.n_max(); ++na) {
        for (int nb = 0; nb <= cutoff.n_max(); ++nb) {
            psi(cutoff.index(na, nb)) = a(na) * b(nb);
        }
    }
    return TwoModePureState(cutoff, std::move(psi)).normalized();
}

TwoModeDensity twin_density(const InputStateSpec &spec, ModeCutoff cutoff) {
    std::vector<Eigen::Triplet<cplx>> triplets;
    if (spec.twin_table.empty()) {
        double weight = 1 - spec.thermal_x;
        for (int n = 0; n + 2 <= cutoff.n_max(); ++n) {
            Eigen::Index k = cutoff.index(n, n);
            triplets.emplace_back(k, k, weight);
            weight *= spec.thermal_x;
        }
    } else {
        for (const TwinTableEntry &e : spec.twin_table) {
            triplets.emplace_back(cutoff.index(e.n, e.n), cutoff.index(e.n_prime, e.n_prime), e.value);
        }
    }
    SparseMatrix m(cutoff.dim(), cutoff.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    TwoModeDensity rho = TwoModeDensity(cutoff, std::move(m)).normalized();
    if (!rho.is_physical()) {
        throw std::invalid_argument("opo_mixture: twin table is not a Hermitian positive density");
    }
    return rho;
}

void require_n(const InputStateSpec &spec, int minimum) {
    if (spec.n < minimum) {
        throw std::invalid_argument(
            fmt::format("{}: n must be >= {}, got {}", to_string(spec.kind), minimum, spec.n));
    }
}

}  // namespace

std::string to_string(StateKind kind) {
    for (const auto &[k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

StateKind parse_state_kind(std::string_view name) {
    for (const auto &[k, known] : kKindNames) {
        if (name == known) {
            return k;
        }
    }
    std::string choices;
    for (const auto &entry : kKindNames) {
        choices += choices.empty() ? "" : ", ";
        choices += entry.second;
    }
    throw std::invalid_argument(fmt::format("unknown state kind '{}' (expected one of {})", name, choices));
}

std::string to_string(HeraldSign sign) {
    return sign == HeraldSign::plus ? "+" : "-";
}

HeraldSign parse_herald_sign(std::string_view text) {
    if (text == "+" || text == "plus") {
        return HeraldSign::plus;
    }
    if (text == "-" || text == "minus") {
        return HeraldSign::minus;
    }
    throw std::invalid_argument(fmt::format("unknown herald sign '{}' (expected + or -)", text));
}

InputStateSpec InputStateSpec::fock_vacuum(int n) {
    InputStateSpec s;
    s.kind = StateKind::fock_vacuum;
    s.n = n;
    return s;
}

InputStateSpec InputStateSpec::coherent_vacuum(cplx alpha) {
    InputStateSpec s;
    s.kind = StateKind::coherent_vacuum;
    s.alpha = alpha;
    return s;
}

InputStateSpec InputStateSpec::coherent_squeezed(cplx alpha, double r) {
    InputStateSpec s;
    s.kind = StateKind::coherent_squeezed;
    s.alpha = alpha;
    s.squeezing = r;
    return s;
}

InputStateSpec InputStateSpec::twin_fock(int n) {
    InputStateSpec s;
    s.kind = StateKind::twin_fock;
    s.n = n;
    return s;
}

InputStateSpec InputStateSpec::fraternal_twin(int n) {
    InputStateSpec s;
    s.kind = StateKind::fraternal_twin;
    s.n = n;
    return s;
}

InputStateSpec InputStateSpec::noon(int n) {
    InputStateSpec s;
    s.kind = StateKind::noon;
    s.n = n;
    return s;
}

InputStateSpec InputStateSpec::ymck(int n) {
    InputStateSpec s;
    s.kind = StateKind::ymck;
    s.n = n;
    return s;
}

InputStateSpec InputStateSpec::subtracted_twin(int n, HeraldSign sign) {
    InputStateSpec s;
    s.kind = StateKind::subtracted_twin;
    s.n = n;
    s.sign = sign;
    return s;
}

InputStateSpec InputStateSpec::opo_thermal(double x) {
    InputStateSpec s;
    s.kind = StateKind::opo_mixture;
    s.thermal_x = x;
    return s;
}

InputStateSpec InputStateSpec::opo_table(std::vector<TwinTableEntry> table) {
    InputStateSpec s;
    s.kind = StateKind::opo_mixture;
    s.twin_table = std::move(table);
    return s;
}

void InputStateSpec::validate() const {
    switch (kind) {
        case StateKind::fock_vacuum:
        case StateKind::twin_fock:
            require_n(*this, 0);
            break;
        case StateKind::fraternal_twin:
        case StateKind::noon:
        case StateKind::ymck:
        case StateKind::subtracted_twin:
            require_n(*this, 1);
            break;
        case StateKind::coherent_vacuum:
            break;
        case StateKind::coherent_squeezed:
            if (!(squeezing >= 0) || !std::isfinite(squeezing)) {
                throw std::invalid_argument(fmt::format("coherent_squeezed: squeezing r must be >= 0, got {}", squeezing));
            }
            break;
        case StateKind::opo_mixture:
            if (twin_table.empty()) {
                if (!(thermal_x > 0 && thermal_x < 1)) {
                    throw std::invalid_argument(fmt::format("opo_mixture: thermal x must lie in (0, 1), got {}", thermal_x));
                }
            } else {
                for (const TwinTableEntry &e : twin_table) {
                    if (e.n < 0 || e.n_prime < 0) {
                        throw std::invalid_argument(
                            fmt::format("opo_mixture: negative photon number in twin table entry ({}, {})", e.n,
                                        e.n_prime));
                    }
                }
            }
            break;
    }
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw std::invalid_argument("alpha must be finite");
    }
    if (!(tail_tolerance > 0 && tail_tolerance < 1)) {
        throw std::invalid_argument(fmt::format("tail tolerance must lie in (0, 1), got {}", tail_tolerance));
    }
    if (n_max && *n_max < 0) {
        throw std::invalid_argument(fmt::format("n_max must be >= 0, got {}", *n_max));
    }
}

ModeCutoff auto_cutoff(const InputStateSpec &spec) {
    spec.validate();
    int needed = 0;
    switch (spec.kind) {
        case StateKind::fock_vacuum:
        case StateKind::twin_fock:
        case StateKind::fraternal_twin:
        case StateKind::noon:
        case StateKind::subtracted_twin:
            needed = spec.n + 2;
            break;
        case StateKind::ymck:
            needed = spec.n + 3;
            break;
        case StateKind::coherent_vacuum:
            needed = coherent_cutoff(spec.alpha, spec.tail_tolerance, spec.max_n_max) + 2;
            break;
        case StateKind::coherent_squeezed:
            // Split the tolerance between the two independent tails.
            needed = std::max(coherent_cutoff(spec.alpha, spec.tail_tolerance / 2, spec.max_n_max),
                              squeezed_cutoff(spec.squeezing, spec.tail_tolerance / 2, spec.max_n_max)) +
                     2;
            break;
        case StateKind::opo_mixture:
            if (spec.twin_table.empty()) {
                needed = thermal_cutoff(spec.thermal_x, spec.tail_tolerance, spec.max_n_max) + 2;
            } else {
                int largest = 0;
                for (const TwinTableEntry &e : spec.twin_table) {
                    largest = std::max({largest, e.n, e.n_prime});
                }
                needed = largest + 2;
            }
            break;
    }
    if (spec.n_max) {
        if (*spec.n_max < needed && is_finite_kind(spec.kind)) {
            throw std::invalid_argument(fmt::format("{}: n_max = {} cannot hold the state (needs {})",
                                                    to_string(spec.kind), *spec.n_max, needed));
        }
        needed = *spec.n_max;
    }
    if (needed > spec.max_n_max) {
        throw std::length_error(fmt::format("{}: required cutoff n_max = {} exceeds the budget of {}",
                                            to_string(spec.kind), needed, spec.max_n_max));
    }
    return ModeCutoff(needed);
}

InputState build(const InputStateSpec &spec) {
    ModeCutoff cutoff = auto_cutoff(spec);
    int n = spec.n;
    switch (spec.kind) {
        case StateKind::fock_vacuum:
            return basis_state(n, 0, cutoff);
        case StateKind::twin_fock:
            return basis_state(n, n, cutoff);
        case StateKind::fraternal_twin:
            return basis_state(n, n - 1, cutoff);
        case StateKind::noon:
            return superposition(cutoff, {{n, 0, 1.0}, {0, n, 1.0}});
        case StateKind::ymck:
            return superposition(cutoff, {{n, n, 1.0}, {n + 1, n - 1, 1.0}});
        case StateKind::subtracted_twin:
            return subtracted_twin(n, spec.sign, cutoff);
        case StateKind::coherent_vacuum: {
            Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(cutoff.per_mode_dim());
            vac(0) = 1;
            return product_state(coherent_amplitudes(spec.alpha, cutoff.n_max()), vac, cutoff);
        }
        case StateKind::coherent_squeezed:
            return product_state(coherent_amplitudes(spec.alpha, cutoff.n_max()),
                                 squeezed_amplitudes(spec.squeezing, cutoff.n_max()), cutoff);
        case StateKind::opo_mixture:
            return twin_density(spec, cutoff);
    }
    throw std::logic_error("build: unhandled state kind");
}

double FringeReference::at(double phi) const {
    return cos_coefficient * std::cos(phi) + sin_coefficient * std::sin(phi);
}

namespace {

struct TableReference {
    std::optional<int> row;
    std::string label;
    std::optional<double> delta_phi;
    std::string delta_phi_formula;
    FringeReference fringe;
};

TableReference table_reference(const InputStateSpec &spec) {
    double n = spec.n;
    double a = std::abs(spec.alpha);
    double a2 = std::norm(spec.alpha);
    TableReference t;
    switch (spec.kind) {
        case StateKind::fock_vacuum:
            t = {1, fmt::format("|{}>_a|0>_b", spec.n), 1 / std::sqrt(n), "1/sqrt(n)",
                 {"n cos(phi)", "N_a-N_b", "exact", n, 0}};
            break;
        case StateKind::coherent_vacuum:
            t = {2, "|alpha>_a|0>_b", 1 / a, "1/|alpha|", {"|alpha|^2 cos(phi)", "N_a-N_b", "exact", a2, 0}};
            break;
        case StateKind::coherent_squeezed:
            t = {3, "|alpha>_a|0,r>_b", std::exp(-spec.squeezing) / a, "exp(-r)/|alpha|",
                 {"|alpha|^2 cos(phi)", "N_a-N_b", "leading_order", a2, 0}};
            break;
        case StateKind::twin_fock:
            t = {4, fmt::format("|{0}>_a|{0}>_b", spec.n), 1 / std::sqrt(2 * n * (n + 1)), "1/sqrt(2n(n+1))",
                 {"0", "J_z", "exact", 0, 0}};
            break;
        case StateKind::fraternal_twin:
            t = {5, fmt::format("|{}>_a|{}>_b", spec.n, spec.n - 1), 1 / std::sqrt(2 * n * n - 1), "1/sqrt(2n^2-1)",
                 {"cos(phi)/2", "J_z", "exact", 0.5, 0}};
            break;
        case StateKind::noon:
            t = {6, fmt::format("noon n={}", spec.n), 1 / n, "1/n",
                 {"~cos(n phi), n-photon detection", "n-photon coincidence", "none", 0, 0}};
            break;
        case StateKind::ymck:
            t = {7, fmt::format("ymck n={}", spec.n), 1 / std::sqrt(n * (n + 1)), "1/sqrt(n(n+1))",
                 {"cos(phi)/2 - sin(phi) sqrt(n(n+2))/4", "J_z", "magnitude", 0.5, -std::sqrt(n * (n + 2)) / 4}};
            break;
        case StateKind::subtracted_twin: {
            double sign = spec.sign == HeraldSign::plus ? -1 : 1;
            t = {8, fmt::format("psi{} n={}", to_string(spec.sign), spec.n), 1 / n, "1/n",
                 {spec.sign == HeraldSign::plus ? "-(n/2) sin(phi)" : "(n/2) sin(phi)", "J_z", "exact", 0,
                  sign * n / 2}};
            break;
        }
        case StateKind::opo_mixture:
            t = {std::nullopt, "opo twin mixture", std::nullopt, "", {"0", "J_z", "exact", 0, 0}};
            break;
    }
    return t;
}

}  // namespace

StateDescription describe(const InputStateSpec &spec, const InputState &built) {
    TableReference ref = table_reference(spec);
    StateDescription d;
    d.label = ref.label;
    d.table_row = ref.row;
    d.delta_phi_reference = ref.delta_phi;
    d.delta_phi_formula = ref.delta_phi_formula;
    d.fringe_reference = ref.fringe;
    const ModeCutoff &cutoff = cutoff_of(built);
    d.n_max = cutoff.n_max();
    std::set<int> support;
    double mean = 0;
    if (const auto *pure = std::get_if<TwoModePureState>(&built)) {
        for (Eigen::Index k = 0; k < cutoff.dim(); ++k) {
            double w = std::norm(pure->amplitudes()(k));
            int total = cutoff.n_a_of(k) + cutoff.n_b_of(k);
            mean += w * total;
            if (w > kSupportTol) {
                support.insert(total);
            }
        }
        double norm2 = pure->norm_squared();
        d.purity = norm2 * norm2;
    } else {
        const TwoModeDensity &rho = std::get<TwoModeDensity>(built);
        for (Eigen::Index k = 0; k < cutoff.dim(); ++k) {
            double w = rho.matrix().coeff(k, k).real();
            int total = cutoff.n_a_of(k) + cutoff.n_b_of(k);
            mean += w * total;
            if (w > kSupportTol) {
                support.insert(total);
            }
        }
        d.purity = rho.purity();
    }
    d.mean_photons = mean;
    d.twice_j_support.assign(support.begin(), support.end());
    return d;
}

StateDescription describe(const InputStateSpec &spec) {
    return describe(spec, build(spec));
}

}  // namespace twinsub
