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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "twinsub/cli.h"
#include "twinsub/estimation.h"
#include "twinsub/subtraction.h"

namespace twinsub::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluates f(0..count-1) on `jobs` workers; results land in index order.
template <typename F>
auto parallel_map(std::size_t count, unsigned jobs, F f) -> std::vector<decltype(f(std::size_t{0}))> {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::optional<R>> slots(count);
    unsigned workers = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = count;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(work);
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::vector<R> out;
    out.reserve(count);
    for (auto &s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

Cell real_or_empty(const std::optional<double> &v) {
    return v ? Cell{*v} : Cell{};
}

// Relative discrepancy used by strict mode.
void compare(StrictReport &report, double tolerance, double measured, double reference, const std::string &what) {
    if (!std::isfinite(measured) || !std::isfinite(reference)) {
        return;
    }
    double discrepancy = std::abs(measured - reference) / std::max(1.0, std::abs(reference));
    ++report.comparisons;
    report.max_discrepancy = std::max(report.max_discrepancy, discrepancy);
    if (discrepancy > tolerance) {
        report.failures.push_back(
            fmt::format("{}: measured {:.17g}, reference {:.17g}, discrepancy {:.3g}", what, measured, reference,
                        discrepancy));
    }
}

InputState subtract(const InputState &input, SubtractionMode mode, double theta) {
    switch (mode) {
        case SubtractionMode::none:
            return input;
        case SubtractionMode::bucket:
            return bucket_subtract(input, theta).state;
        case SubtractionMode::coherent_plus:
            return coherent_subtract(input, theta, HeraldSign::plus).state;
        case SubtractionMode::coherent_minus:
            return coherent_subtract(input, theta, HeraldSign::minus).state;
    }
    return input;
}

bool is_coherent(SubtractionMode mode) {
    return mode == SubtractionMode::coherent_plus || mode == SubtractionMode::coherent_minus;
}

// Closed-form phase error for the prepared state, when one exists.
std::function<double(double)> phase_sweep_reference(const SweepConfig &c, const InputState &input) {
    const InputStateSpec &s = c.state;
    bool pure_twin = (s.kind == StateKind::subtracted_twin && c.subtraction == SubtractionMode::none) ||
                     (s.kind == StateKind::twin_fock && is_coherent(c.subtraction));
    bool plus = s.kind == StateKind::subtracted_twin ? s.sign == HeraldSign::plus
                                                     : c.subtraction == SubtractionMode::coherent_plus;
    auto guarded = [](auto formula) {
        return [formula](double phi) {
            try {
                return formula(phi);
            } catch (const std::domain_error &) {
                return kInf;
            }
        };
    };
    if (pure_twin && !c.loss) {
        int n = s.n;
        return guarded([n](double phi) { return analytic_delta_phi_pure(n, phi); });
    }
    if (pure_twin && c.loss && plus) {
        SpinMoments m = lossy_input_moments(s.n, *c.loss);
        return [m](double phi) { return delta_phi_from_moments(m, phi); };
    }
    if (s.kind == StateKind::opo_mixture && is_coherent(c.subtraction) && !c.loss) {
        MixtureCoefficients coefficients = mixture_coefficients(std::get<TwoModeDensity>(input));
        return guarded([coefficients](double phi) { return mixture_delta_phi(coefficients, phi); });
    }
    return {};
}

ExperimentResult run_phase_sweep(const SweepConfig &c) {
    InputState input = build(c.state);
    InputState prepared = subtract(input, c.subtraction, c.theta);
    if (c.loss) {
        prepared = apply_losses(*c.loss, to_density(prepared));
    }
    SpinMoments moments = spin_moments(prepared);
    auto reference = phase_sweep_reference(c, input);

    ExperimentResult r{Experiment::phase_sweep, {}, {}, {}};
    std::string analytic_op = reference ? (c.loss ? "delta_phi_from_moments(lossy_input_moments)"
                                          : c.state.kind == StateKind::opo_mixture ? "mixture_delta_phi"
                                                                                   : "analytic_delta_phi_pure")
                                        : "unavailable";
    r.columns = {
        {"phi", "input", "phi grid", "parameter"},
        {"mean_jz", "estimation", "fringe", "numeric"},
        {"var_jz", "estimation", "output_variance", "numeric"},
        {"delta_phi_numeric", "estimation", "phase_error_numeric", "numeric"},
        {"delta_phi_analytic", "estimation", analytic_op, reference && c.loss ? "closed_form" : "analytic"},
    };
    struct Row {
        PhasePoint point;
        std::optional<double> analytic;
    };
    auto rows = parallel_map(c.phis.size(), c.jobs, [&](std::size_t i) {
        Row row{phase_point(moments, c.phis[i]), std::nullopt};
        if (reference) {
            row.analytic = reference(c.phis[i]);
        }
        return row;
    });
    for (const Row &row : rows) {
        r.rows.push_back({row.point.phi, row.point.mean_jz, row.point.var_jz, row.point.delta_phi,
                          real_or_empty(row.analytic)});
        if (row.analytic) {
            compare(r.strict, c.tolerance, row.point.delta_phi, *row.analytic,
                    fmt::format("phase_sweep phi={:.17g}", row.point.phi));
        }
    }
    return r;
}

ExperimentResult run_loss_sweep(const SweepConfig &c) {
    int n = c.state.n;
    double phi = c.phis.front();
    TippingPoint tipping = tipping_transmission(n);
    ExperimentResult r{Experiment::loss_sweep, {}, {}, {}};
    r.columns = {
        {"t", "input", "transmission grid (t1 = t2 = t)", "parameter"},
        {"phi", "input", "phi", "parameter"},
        {"delta_phi_numeric", "estimation", "lossy_delta_phi_numeric", "numeric"},
        {"delta_phi_moments", "estimation", "delta_phi_from_moments(lossy_input_moments)", "closed_form"},
        {"delta_phi_closed_form", "estimation", "lossy_delta_phi", "analytic"},
        {"delta_phi_limit", "estimation", "lossy_delta_phi_limit", "analytic"},
        {"heisenberg_term", "estimation", "1/(t n)", "analytic"},
        {"shot_noise_term", "estimation", "sqrt((1 - t^2)/(t^3 n))", "analytic"},
        {"loss_ratio", "estimation", "n (1 - t^2)/t", "analytic"},
        {"tipping_transmission", "estimation", "tipping_transmission", "numeric"},
        {"regime", "estimation", "loss_ratio < 1 ? heisenberg : shot_noise", "analytic"},
    };
    struct Row {
        double t, numeric, moments;
        std::optional<double> closed;
        double limit, hl, snl, ratio;
    };
    auto rows = parallel_map(c.transmissions.size(), c.jobs, [&](std::size_t i) {
        double t = c.transmissions[i];
        LossSpec loss = LossSpec::symmetric(t);
        Row row;
        row.t = t;
        row.numeric = lossy_delta_phi_numeric(n, loss, phi);
        row.moments = delta_phi_from_moments(lossy_input_moments(n, loss), phi);
        try {
            row.closed = lossy_delta_phi(n, loss, phi);
        } catch (const std::domain_error &) {
            row.closed = std::nullopt;
        }
        row.limit = lossy_delta_phi_limit(n, t);
        row.hl = 1 / (t * n);
        row.snl = std::sqrt((1 - t * t) / (t * t * t * n));
        row.ratio = n * (1 - t * t) / t;
        return row;
    });
    for (const Row &row : rows) {
        r.rows.push_back({row.t, phi, row.numeric, row.moments, real_or_empty(row.closed), row.limit, row.hl, row.snl,
                          row.ratio, tipping.transmission,
                          std::string(row.ratio < 1 ? "heisenberg" : "shot_noise")});
        compare(r.strict, c.tolerance, row.numeric, row.moments, fmt::format("loss_sweep t={:.17g}", row.t));
    }
    return r;
}

TwoModeOperator qfi_generator(const InputStateSpec &spec, ModeCutoff cutoff) {
    return spec.kind == StateKind::noon ? number_operator(Mode::a, cutoff)
                                        : schwinger(SchwingerComponent::jy, cutoff);
}

// Measured quantities of one catalog state next to its table entry.
struct StateReport {
    StateDescription description;
    std::optional<double> qcrb;
    double delta_phi_min;
    double phi_at_min;
    double delta_phi_at_zero;
    std::string compared;  // "qcrb" or "error_propagation(phi=0)"
    std::optional<double> measured;
    std::string reference_kind;  // "exact" or "leading_order"
    SpinMoments moments;
};

StateReport report_state(const InputStateSpec &spec, const std::vector<double> &phis) {
    InputState state = build(spec);
    StateReport rep;
    rep.description = describe(spec, state);
    rep.moments = spin_moments(state);
    if (const auto *pure = std::get_if<TwoModePureState>(&state)) {
        rep.qcrb = quantum_cramer_rao_bound(qfi_pure(*pure, qfi_generator(spec, pure->cutoff())));
    }
    rep.delta_phi_min = kInf;
    rep.phi_at_min = std::numeric_limits<double>::quiet_NaN();
    for (double phi : phis) {
        double d = delta_phi_from_moments(rep.moments, phi);
        if (d < rep.delta_phi_min) {
            rep.delta_phi_min = d;
            rep.phi_at_min = phi;
        }
    }
    rep.delta_phi_at_zero = delta_phi_from_moments(rep.moments, 0.0);
    // The ymck and subtracted-twin entries coincide with the phi = 0 error propagation.
    if (spec.kind == StateKind::ymck || spec.kind == StateKind::subtracted_twin) {
        rep.compared = "error_propagation(phi=0)";
        rep.measured = rep.delta_phi_at_zero;
    } else {
        rep.compared = "qcrb";
        rep.measured = rep.qcrb;
    }
    rep.reference_kind = spec.kind == StateKind::coherent_squeezed ? "leading_order" : "exact";
    return rep;
}

std::optional<double> relative_error(const std::optional<double> &measured, const std::optional<double> &reference) {
    if (!measured || !reference) {
        return std::nullopt;
    }
    return std::abs(*measured - *reference) / std::abs(*reference);
}

ExperimentResult run_n_scaling(const SweepConfig &c) {
    ExperimentResult r{Experiment::n_scaling, {}, {}, {}};
    r.columns = {
        {"n", "input", "n grid", "parameter"},
        {"mean_photons", "catalog", "describe", "numeric"},
        {"delta_phi_min", "estimation", "min over phi grid of phase_error_numeric", "numeric"},
        {"phi_at_min", "estimation", "argmin over phi grid", "numeric"},
        {"delta_phi_at_zero", "estimation", "phase_error_numeric(phi=0)", "numeric"},
        {"qcrb", "estimation", "quantum_cramer_rao_bound(qfi_pure)", "numeric"},
        {"table_reference", "catalog", "describe.delta_phi_reference", "reference"},
        {"heisenberg_limit", "estimation", "1/<N>", "analytic"},
        {"shot_noise_limit", "estimation", "1/sqrt(<N>)", "analytic"},
    };
    auto reports = parallel_map(c.photon_numbers.size(), c.jobs, [&](std::size_t i) {
        InputStateSpec spec = c.state;
        spec.n = c.photon_numbers[i];
        return report_state(spec, c.phis);
    });
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const StateReport &rep = reports[i];
        double mean = rep.description.mean_photons;
        r.rows.push_back({static_cast<long long>(c.photon_numbers[i]), mean, rep.delta_phi_min, rep.phi_at_min,
                          rep.delta_phi_at_zero, real_or_empty(rep.qcrb),
                          real_or_empty(rep.description.delta_phi_reference), 1 / mean, 1 / std::sqrt(mean)});
        if (rep.reference_kind == "exact" && rep.measured && rep.description.delta_phi_reference) {
            compare(r.strict, c.tolerance, *rep.measured, *rep.description.delta_phi_reference,
                    fmt::format("n_scaling n={} {}", c.photon_numbers[i], rep.compared));
        }
    }
    return r;
}

ExperimentResult run_table1(const SweepConfig &c) {
    int n = c.state.n;
    cplx alpha = c.state.alpha;
    double r_sq = c.state.squeezing;
    std::vector<InputStateSpec> specs{
        InputStateSpec::fock_vacuum(n),          InputStateSpec::coherent_vacuum(alpha),
        InputStateSpec::coherent_squeezed(alpha, r_sq), InputStateSpec::twin_fock(n),
        InputStateSpec::fraternal_twin(n),       InputStateSpec::noon(n),
        InputStateSpec::ymck(n),                 InputStateSpec::subtracted_twin(n, HeraldSign::plus),
    };
    ExperimentResult r{Experiment::table1, {}, {}, {}};
    r.columns = {
        {"row", "catalog", "describe.table_row", "reference"},
        {"state", "catalog", "describe.label", "reference"},
        {"mean_photons", "catalog", "describe", "numeric"},
        {"compared_quantity", "estimation", "qcrb or error_propagation(phi=0)", "reference"},
        {"measured", "estimation", "qfi_pure / phase_error_numeric", "numeric"},
        {"table_value", "catalog", "describe.delta_phi_reference", "reference"},
        {"table_formula", "catalog", "describe.delta_phi_formula", "reference"},
        {"relative_error", "estimation", "|measured - table| / table", "numeric"},
        {"reference_kind", "catalog", "exact or leading_order", "reference"},
        {"qcrb", "estimation", "quantum_cramer_rao_bound(qfi_pure)", "numeric"},
        {"delta_phi_min", "estimation", "min over phi grid of phase_error_numeric", "numeric"},
        {"fringe_observable", "catalog", "describe.fringe_reference.observable", "reference"},
        {"fringe_formula", "catalog", "describe.fringe_reference.formula", "reference"},
        {"fringe_comparison", "catalog", "describe.fringe_reference.comparison", "reference"},
        {"fringe_cos_measured", "estimation", "fringe cos(phi) coefficient", "numeric"},
        {"fringe_sin_measured", "estimation", "fringe sin(phi) coefficient", "numeric"},
        {"fringe_cos_table", "catalog", "describe.fringe_reference", "reference"},
        {"fringe_sin_table", "catalog", "describe.fringe_reference", "reference"},
        {"fringe_amplitude_measured", "estimation", "hypot of measured coefficients", "numeric"},
        {"fringe_amplitude_table", "catalog", "hypot of table coefficients", "reference"},
    };
    auto reports = parallel_map(specs.size(), c.jobs, [&](std::size_t i) { return report_state(specs[i], c.phis); });
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const StateReport &rep = reports[i];
        const StateDescription &d = rep.description;
        const FringeReference &f = d.fringe_reference;
        std::vector<Cell> row{static_cast<long long>(d.table_row.value_or(0)),
                              d.label,
                              d.mean_photons,
                              rep.compared,
                              real_or_empty(rep.measured),
                              real_or_empty(d.delta_phi_reference),
                              d.delta_phi_formula,
                              real_or_empty(relative_error(rep.measured, d.delta_phi_reference)),
                              rep.reference_kind,
                              real_or_empty(rep.qcrb),
                              rep.delta_phi_min,
                              f.observable,
                              f.formula,
                              f.comparison};
        if (f.comparison == "none") {
            row.insert(row.end(), {Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}});
        } else {
            // <J_z^out> = <J_z> cos(phi) - <J_x> sin(phi); N_a - N_b doubles it.
            double scale = f.observable == "N_a-N_b" ? 2.0 : 1.0;
            double cos_m = scale * rep.moments.jz;
            double sin_m = -scale * rep.moments.jx;
            row.insert(row.end(), {cos_m, sin_m, f.cos_coefficient, f.sin_coefficient, std::hypot(cos_m, sin_m),
                                   std::hypot(f.cos_coefficient, f.sin_coefficient)});
            if (f.comparison == "exact") {
                compare(r.strict, c.tolerance, cos_m, f.cos_coefficient, fmt::format("table1 row {} fringe cos", i + 1));
                compare(r.strict, c.tolerance, sin_m, f.sin_coefficient, fmt::format("table1 row {} fringe sin", i + 1));
            }
        }
        r.rows.push_back(std::move(row));
        if (rep.reference_kind == "exact" && rep.measured && d.delta_phi_reference) {
            compare(r.strict, c.tolerance, *rep.measured, *d.delta_phi_reference,
                    fmt::format("table1 row {} {}", i + 1, rep.compared));
        }
    }
    return r;
}

ExperimentResult run_protocol_compare(const SweepConfig &c) {
    InputState input = build(c.state);
    ExperimentResult r{Experiment::protocol_compare, {}, {}, {}};
    r.columns = {
        {"protocol", "subtraction", "bucket_subtract / coherent_subtract", "parameter"},
        {"herald_probability", "subtraction", "HeraldOutcome.herald_probability", "numeric"},
        {"discarded_weight", "subtraction", "HeraldOutcome.discarded_weight", "numeric"},
        {"purity", "fock_core", "TwoModeDensity::purity", "numeric"},
        {"mean_photons", "fock_core", "expectation(total_number_operator)", "numeric"},
        {"jx", "estimation", "spin_moments", "numeric"},
        {"jz", "estimation", "spin_moments", "numeric"},
        {"delta_phi_at_zero", "estimation", "phase_error_numeric(phi=0)", "numeric"},
        {"trace_distance_to_bucket", "fock_core", "trace_distance", "numeric"},
    };
    std::vector<SubtractionProtocol> protocols{SubtractionProtocol::bucket, SubtractionProtocol::coherent_plus,
                                               SubtractionProtocol::coherent_minus};
    auto outcomes = parallel_map(protocols.size(), c.jobs, [&](std::size_t i) {
        switch (protocols[i]) {
            case SubtractionProtocol::bucket:
                return bucket_subtract(input, c.theta);
            case SubtractionProtocol::coherent_plus:
                return coherent_subtract(input, c.theta, HeraldSign::plus);
            case SubtractionProtocol::coherent_minus:
                break;
        }
        return coherent_subtract(input, c.theta, HeraldSign::minus);
    });
    TwoModeDensity bucket = outcomes[0].density();
    double p_plus = outcomes[1].herald_probability;
    double p_minus = outcomes[2].herald_probability;
    TwoModeDensity average(bucket.cutoff(), (p_plus * outcomes[1].density().matrix() +
                                             p_minus * outcomes[2].density().matrix()) /
                                                (p_plus + p_minus));
    TwoModeOperator total = total_number_operator(bucket.cutoff());
    auto add_row = [&](const std::string &name, double probability, double discarded, const TwoModeDensity &rho) {
        SpinMoments m = spin_moments(rho);
        r.rows.push_back({name, probability, discarded, rho.purity(), real_expectation(rho, total), m.jx, m.jz,
                          delta_phi_from_moments(m, 0.0), trace_distance(rho, bucket)});
    };
    for (const HeraldOutcome &o : outcomes) {
        add_row(to_string(o.protocol), o.herald_probability, o.discarded_weight, o.density());
    }
    add_row("coherent_weighted_average", p_plus + p_minus,
            std::max(outcomes[1].discarded_weight, outcomes[2].discarded_weight), average);
    double distance = trace_distance(average, bucket);
    ++r.strict.comparisons;
    r.strict.max_discrepancy = distance;
    if (distance > c.tolerance) {
        r.strict.failures.push_back(
            fmt::format("protocol_compare: weighted coherent average differs from bucket by {:.3g}", distance));
    }
    return r;
}

}  // namespace

ExperimentResult run_experiment(const SweepConfig &config) {
    config.validate();
    switch (config.experiment) {
        case Experiment::phase_sweep:
            return run_phase_sweep(config);
        case Experiment::loss_sweep:
            return run_loss_sweep(config);
        case Experiment::n_scaling:
            return run_n_scaling(config);
        case Experiment::table1:
            return run_table1(config);
        case Experiment::protocol_compare:
            return run_protocol_compare(config);
    }
    throw std::logic_error("run_experiment: unhandled experiment");
}

}  // namespace twinsub::cli
