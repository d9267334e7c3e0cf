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

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/poisson.hpp>
#include <doctest.h>

#include "twinsub/catalog.h"
#include "twinsub/estimation.h"

using namespace twinsub;

namespace {

const TwoModePureState &pure(const InputState &s) {
    return std::get<TwoModePureState>(s);
}

}  // namespace

TEST_CASE("finite catalog states") {
    auto twin = build(InputStateSpec::twin_fock(3));
    CHECK(cutoff_of(twin).n_max() == 5);
    CHECK(real_expectation(pure(twin), total_number_operator(cutoff_of(twin))) == doctest::Approx(6.0));
    CHECK(std::abs(pure(twin).amplitude(3, 3) - 1.0) < 1e-15);

    auto noon = pure(build(InputStateSpec::noon(4)));
    auto na = number_operator(Mode::a, noon.cutoff());
    double mean = real_expectation(noon, na);
    CHECK(mean == doctest::Approx(2.0));
    CHECK(real_expectation(noon, na * na) - mean * mean == doctest::Approx(4.0));
    CHECK(std::norm(noon.amplitude(4, 0)) == doctest::Approx(0.5));
    CHECK(std::norm(noon.amplitude(0, 4)) == doctest::Approx(0.5));

    auto fraternal = pure(build(InputStateSpec::fraternal_twin(4)));
    CHECK(std::abs(fraternal.amplitude(4, 3) - 1.0) < 1e-15);

    auto ymck = pure(build(InputStateSpec::ymck(3)));
    CHECK(cutoff_of(InputState(ymck)).n_max() == 6);
    CHECK(std::norm(ymck.amplitude(3, 3)) == doctest::Approx(0.5));
    CHECK(std::norm(ymck.amplitude(4, 2)) == doctest::Approx(0.5));

    auto fock = pure(build(InputStateSpec::fock_vacuum(5)));
    CHECK(std::abs(fock.amplitude(5, 0) - 1.0) < 1e-15);

    auto minus = pure(build(InputStateSpec::subtracted_twin(2, HeraldSign::minus)));
    CHECK(std::abs(minus.amplitude(2, 1) + minus.amplitude(1, 2)) < 1e-15);
}

TEST_CASE("coherent state has Poisson statistics") {
    cplx alpha(2.0, 1.0);
    auto state = pure(build(InputStateSpec::coherent_vacuum(alpha)));
    const auto &c = state.cutoff();
    boost::math::poisson_distribution<double> poisson(std::norm(alpha));
    double tail = 1 - boost::math::cdf(poisson, c.n_max());
    CHECK(tail < 1e-12);
    for (int k = 0; k <= 15; ++k) {
        CHECK(std::norm(state.amplitude(k, 0)) == doctest::Approx(boost::math::pdf(poisson, k)).epsilon(1e-10));
    }
    // Phase of the amplitude follows alpha^k.
    CHECK(std::arg(state.amplitude(1, 0)) == doctest::Approx(std::arg(alpha)));
    CHECK(state.is_normalized());
    auto na = number_operator(Mode::a, c);
    CHECK(real_expectation(state, na) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("squeezed vacuum has even support and sinh^2 r photons") {
    auto spec = InputStateSpec::coherent_squeezed(0.0, 0.8);
    auto state = pure(build(spec));
    const auto &c = state.cutoff();
    for (int k = 1; k <= c.n_max(); k += 2) {
        CHECK(state.amplitude(0, k) == cplx(0));
    }
    auto nb = number_operator(Mode::b, c);
    CHECK(real_expectation(state, nb) == doctest::Approx(std::sinh(0.8) * std::sinh(0.8)).epsilon(1e-10));
    // <0|S(r)|0> = 1/sqrt(cosh r).
    CHECK(std::abs(state.amplitude(0, 0)) == doctest::Approx(1 / std::sqrt(std::cosh(0.8))).epsilon(1e-12));
}

TEST_CASE("coherent times squeezed mean photon number") {
    auto d = describe(InputStateSpec::coherent_squeezed(3.0, 1.0));
    CHECK(d.mean_photons == doctest::Approx(9 + std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-9));
    CHECK(d.purity == doctest::Approx(1.0));
    CHECK(d.table_row == 3);
}

TEST_CASE("opo thermal mixture") {
    auto spec = InputStateSpec::opo_thermal(0.7);
    CHECK(auto_cutoff(spec).n_max() == 79);
    auto built = build(spec);
    REQUIRE(std::holds_alternative<TwoModeDensity>(built));
    const auto &rho = std::get<TwoModeDensity>(built);
    CHECK(rho.is_physical());
    CHECK(is_twin_form(rho));
    double ratio = rho.element(3, 3, 3, 3).real() / rho.element(2, 2, 2, 2).real();
    CHECK(ratio == doctest::Approx(0.7).epsilon(1e-12));
    auto d = describe(spec, built);
    CHECK_FALSE(d.table_row.has_value());
    CHECK_FALSE(d.delta_phi_reference.has_value());
    CHECK(d.purity < 1);
    for (int twice_j : d.twice_j_support) {
        CHECK(twice_j % 2 == 0);
    }

    // Explicit table with a coherence.
    auto table = InputStateSpec::opo_table({{1, 1, 0.5}, {2, 2, 0.5}, {1, 2, 0.5}, {2, 1, 0.5}});
    auto coherent_rho = std::get<TwoModeDensity>(build(table));
    CHECK(coherent_rho.purity() == doctest::Approx(1.0));
    CHECK(cutoff_of(InputState(coherent_rho)).n_max() == 4);

    CHECK_THROWS_AS(build(InputStateSpec::opo_table({{1, 1, 1.0}, {2, 2, -0.5}})), std::invalid_argument);
    CHECK_THROWS_AS(InputStateSpec::opo_thermal(1.0).validate(), std::invalid_argument);
}

TEST_CASE("cutoff policy and budget") {
    CHECK(auto_cutoff(InputStateSpec::twin_fock(7)).n_max() == 9);
    auto spec = InputStateSpec::twin_fock(7);
    spec.n_max = 12;
    CHECK(auto_cutoff(spec).n_max() == 12);
    spec.n_max = 5;
    CHECK_THROWS_AS(auto_cutoff(spec), std::invalid_argument);

    auto big = InputStateSpec::coherent_vacuum(30.0);
    big.max_n_max = 100;
    CHECK_THROWS_AS(auto_cutoff(big), std::length_error);
    auto fock = InputStateSpec::fock_vacuum(50);
    fock.max_n_max = 40;
    CHECK_THROWS_AS(auto_cutoff(fock), std::length_error);

    CHECK_THROWS_AS(InputStateSpec::twin_fock(-1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(InputStateSpec::subtracted_twin(0, HeraldSign::plus).validate(), std::invalid_argument);
    CHECK_THROWS_AS(InputStateSpec::coherent_squeezed(1.0, -0.5).validate(), std::invalid_argument);
}

TEST_CASE("names round-trip") {
    for (StateKind kind : {StateKind::fock_vacuum, StateKind::coherent_vacuum, StateKind::coherent_squeezed,
                           StateKind::twin_fock, StateKind::fraternal_twin, StateKind::noon, StateKind::ymck,
                           StateKind::subtracted_twin, StateKind::opo_mixture}) {
        CHECK(parse_state_kind(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(parse_state_kind("squeezed_cat"), std::invalid_argument);
    CHECK(parse_herald_sign("+") == HeraldSign::plus);
    CHECK(parse_herald_sign(to_string(HeraldSign::minus)) == HeraldSign::minus);
    CHECK_THROWS_AS(parse_herald_sign("0"), std::invalid_argument);
}

TEST_CASE("table descriptions") {
    auto twin = describe(InputStateSpec::twin_fock(3));
    CHECK(twin.table_row == 4);
    CHECK(twin.mean_photons == doctest::Approx(6.0));
    CHECK(twin.twice_j_support == std::vector<int>{6});
    CHECK(*twin.delta_phi_reference == doctest::Approx(1 / std::sqrt(24.0)));
    CHECK(twin.fringe_reference.at(0.7) == 0.0);

    auto psi = describe(InputStateSpec::subtracted_twin(5, HeraldSign::plus));
    CHECK(psi.table_row == 8);
    CHECK(psi.twice_j_support == std::vector<int>{9});
    CHECK(psi.fringe_reference.at(0.3) == doctest::Approx(-2.5 * std::sin(0.3)));
    auto psi_minus = describe(InputStateSpec::subtracted_twin(5, HeraldSign::minus));
    CHECK(psi_minus.fringe_reference.at(0.3) == doctest::Approx(2.5 * std::sin(0.3)));

    CHECK(describe(InputStateSpec::noon(3)).fringe_reference.comparison == "none");
    CHECK(describe(InputStateSpec::ymck(3)).fringe_reference.comparison == "magnitude");
    CHECK(describe(InputStateSpec::coherent_vacuum(2.0)).fringe_reference.observable == "N_a-N_b");
    CHECK(*describe(InputStateSpec::fraternal_twin(4)).delta_phi_reference == doctest::Approx(1 / std::sqrt(31.0)));
}

TEST_CASE("exact fringe references match the interferometer") {
    // The N_a - N_b references are twice the J_z fringe.
    for (const auto &spec : {InputStateSpec::fock_vacuum(6), InputStateSpec::coherent_vacuum(2.0),
                             InputStateSpec::twin_fock(4), InputStateSpec::fraternal_twin(4),
                             InputStateSpec::subtracted_twin(4, HeraldSign::plus),
                             InputStateSpec::subtracted_twin(4, HeraldSign::minus)}) {
        auto built = build(spec);
        auto d = describe(spec, built);
        REQUIRE(d.fringe_reference.comparison == "exact");
        double scale = d.fringe_reference.observable == "N_a-N_b" ? 2.0 : 1.0;
        for (double phi : {-1.0, 0.0, 0.5, 2.5}) {
            CHECK(scale * fringe(built, phi) == doctest::Approx(d.fringe_reference.at(phi)).epsilon(1e-10));
        }
    }
}

TEST_CASE("property: twin mixtures have no photon-number difference") {
    for (const auto &spec : {InputStateSpec::opo_thermal(0.3), InputStateSpec::opo_thermal(0.7),
                             InputStateSpec::opo_table({{0, 0, 0.2}, {3, 3, 0.8}, {0, 3, 0.4}, {3, 0, 0.4}})}) {
        auto rho = std::get<TwoModeDensity>(build(spec));
        auto diff = number_operator(Mode::a, rho.cutoff()) - number_operator(Mode::b, rho.cutoff());
        double mean = real_expectation(rho, diff);
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(real_expectation(rho, diff * diff) - mean * mean) < 1e-10);
    }
}
