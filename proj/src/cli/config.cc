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
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "twinsub/cli.h"

namespace twinsub::cli {

namespace {

constexpr std::array<Experiment, 5> kExperiments{Experiment::phase_sweep, Experiment::loss_sweep,
                                                 Experiment::n_scaling, Experiment::table1,
                                                 Experiment::protocol_compare};

const std::vector<std::string> kCommonKeys{"out", "format", "strict", "tolerance", "jobs", "seed"};

std::string_view trim(std::string_view s) {
    const char *ws = " \t\r\n";
    auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

// Splits on commas that sit outside parentheses.
std::vector<std::string_view> split_top_level(std::string_view s) {
    std::vector<std::string_view> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') {
            ++depth;
        } else if (s[i] == ')') {
            --depth;
        } else if (s[i] == ',' && depth == 0) {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    parts.push_back(trim(s.substr(start)));
    return parts;
}

std::string_view strip_brackets(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
        return trim(s.substr(1, s.size() - 2));
    }
    return s;
}

// Returns the argument list of `name(...)`, or nullopt if s is not such a call.
std::optional<std::string_view> call_arguments(std::string_view s, std::string_view name) {
    s = trim(s);
    if (s.size() > name.size() + 1 && s.substr(0, name.size()) == name && s[name.size()] == '(' && s.back() == ')') {
        return s.substr(name.size() + 1, s.size() - name.size() - 2);
    }
    return std::nullopt;
}

double parse_plain_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument(fmt::format("'{}' is not a number", s));
    }
    return value;
}

long long parse_integer(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument(fmt::format("'{}' is not an integer", s));
    }
    return value;
}

bool parse_bool(std::string_view s) {
    std::string v(trim(s));
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw std::invalid_argument(fmt::format("'{}' is not a boolean", s));
}

std::optional<Experiment> experiment_from_command(std::string_view name) {
    for (Experiment e : kExperiments) {
        if (name == command_name(e) || name == to_string(e)) {
            return e;
        }
    }
    return std::nullopt;
}

std::vector<TwinTableEntry> parse_twin_table(std::string_view text) {
    std::vector<TwinTableEntry> table;
    for (std::string_view item : split_top_level(strip_brackets(text))) {
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= item.size(); ++i) {
            if (i == item.size() || item[i] == ':') {
                fields.push_back(trim(item.substr(start, i - start)));
                start = i + 1;
            }
        }
        if (fields.size() != 3 && fields.size() != 4) {
            throw std::invalid_argument(fmt::format("twin table entry '{}' must read n:n':re or n:n':re:im", item));
        }
        TwinTableEntry e;
        e.n = static_cast<int>(parse_integer(fields[0]));
        e.n_prime = static_cast<int>(parse_integer(fields[1]));
        double im = fields.size() == 4 ? parse_real(fields[3]) : 0.0;
        e.value = cplx(parse_real(fields[2]), im);
        table.push_back(e);
    }
    return table;
}

void require_strictly_increasing(const std::vector<double> &grid, const char *field) {
    if (grid.empty()) {
        throw ConfigError("", field, "grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ConfigError("", field,
                              fmt::format("grid must be strictly increasing (entry {} = {} follows {})", i, grid[i],
                                          grid[i - 1]));
        }
    }
}

bool uses_subtraction(const SweepConfig &c) {
    return c.experiment == Experiment::protocol_compare || c.subtraction != SubtractionMode::none;
}

SubtractionMode parse_subtraction(std::string_view s) {
    if (s == "none") {
        return SubtractionMode::none;
    }
    if (s == "bucket") {
        return SubtractionMode::bucket;
    }
    if (s == "coherent+" || s == "coherent_plus") {
        return SubtractionMode::coherent_plus;
    }
    if (s == "coherent-" || s == "coherent_minus") {
        return SubtractionMode::coherent_minus;
    }
    throw std::invalid_argument(fmt::format("unknown subtraction '{}' (expected none, bucket, coherent+ or coherent-)", s));
}

}  // namespace

ConfigError::ConfigError(std::string origin, std::string field, const std::string &message)
    : std::runtime_error(origin.empty() ? fmt::format("field '{}': {}", field, message)
                                        : fmt::format("{}: field '{}': {}", origin, field, message)),
      origin_(std::move(origin)),
      field_(std::move(field)),
      message_(message) {}

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::phase_sweep:
            return "phase_sweep";
        case Experiment::loss_sweep:
            return "loss_sweep";
        case Experiment::n_scaling:
            return "n_scaling";
        case Experiment::table1:
            return "table1";
        case Experiment::protocol_compare:
            return "protocol_compare";
    }
    return "unknown";
}

std::string command_name(Experiment e) {
    std::string name = to_string(e);
    std::replace(name.begin(), name.end(), '_', '-');
    return name;
}

std::string to_string(SubtractionMode mode) {
    switch (mode) {
        case SubtractionMode::none:
            return "none";
        case SubtractionMode::bucket:
            return "bucket";
        case SubtractionMode::coherent_plus:
            return "coherent+";
        case SubtractionMode::coherent_minus:
            return "coherent-";
    }
    return "unknown";
}

double parse_real(std::string_view text) {
    std::string_view s = trim(unquote(trim(text)));
    if (auto args = call_arguments(s, "sqrt")) {
        double x = parse_real(*args);
        if (x < 0) {
            throw std::invalid_argument(fmt::format("sqrt of negative value in '{}'", s));
        }
        return std::sqrt(x);
    }
    auto pi_pos = s.find("pi");
    if (pi_pos != std::string_view::npos) {
        std::string_view prefix = trim(s.substr(0, pi_pos));
        std::string_view suffix = trim(s.substr(pi_pos + 2));
        double coefficient = 1;
        if (!prefix.empty() && prefix.back() == '*') {
            prefix = trim(prefix.substr(0, prefix.size() - 1));
        }
        if (prefix == "-") {
            coefficient = -1;
        } else if (!prefix.empty() && prefix != "+") {
            coefficient = parse_plain_number(prefix);
        }
        double value = coefficient * std::numbers::pi;
        if (!suffix.empty()) {
            if (suffix.front() != '/') {
                throw std::invalid_argument(fmt::format("cannot parse '{}'", s));
            }
            double divisor = parse_plain_number(suffix.substr(1));
            if (divisor == 0) {
                throw std::invalid_argument(fmt::format("division by zero in '{}'", s));
            }
            value /= divisor;
        }
        return value;
    }
    double value = parse_plain_number(s);
    if (!std::isfinite(value)) {
        throw std::invalid_argument(fmt::format("'{}' is not finite", s));
    }
    return value;
}

std::vector<double> parse_real_grid(std::string_view text) {
    std::string_view s = trim(unquote(trim(text)));
    if (auto args = call_arguments(s, "linspace")) {
        auto parts = split_top_level(*args);
        if (parts.size() != 3) {
            throw std::invalid_argument("linspace takes (first, last, count)");
        }
        double first = parse_real(parts[0]);
        double last = parse_real(parts[1]);
        long long count = parse_integer(parts[2]);
        if (count < 1) {
            throw std::invalid_argument("linspace count must be >= 1");
        }
        std::vector<double> grid(static_cast<std::size_t>(count));
        for (long long k = 0; k < count; ++k) {
            grid[k] = count == 1 ? first : first + (last - first) * static_cast<double>(k) / (count - 1);
        }
        if (count > 1) {
            grid.back() = last;
        }
        return grid;
    }
    std::vector<double> grid;
    for (std::string_view item : split_top_level(strip_brackets(s))) {
        grid.push_back(parse_real(item));
    }
    return grid;
}

std::vector<int> parse_int_grid(std::string_view text) {
    std::string_view s = trim(unquote(trim(text)));
    if (auto args = call_arguments(s, "range")) {
        auto parts = split_top_level(*args);
        if (parts.size() != 2 && parts.size() != 3) {
            throw std::invalid_argument("range takes (first, last[, step])");
        }
        long long first = parse_integer(parts[0]);
        long long last = parse_integer(parts[1]);
        long long step = parts.size() == 3 ? parse_integer(parts[2]) : 1;
        if (step <= 0) {
            throw std::invalid_argument("range step must be positive");
        }
        std::vector<int> grid;
        for (long long v = first; v <= last; v += step) {
            grid.push_back(static_cast<int>(v));
        }
        return grid;
    }
    std::vector<int> grid;
    for (std::string_view item : split_top_level(strip_brackets(s))) {
        grid.push_back(static_cast<int>(parse_integer(item)));
    }
    return grid;
}

std::vector<std::string> known_keys(Experiment e) {
    std::vector<std::string> keys = kCommonKeys;
    std::vector<std::string> extra;
    switch (e) {
        case Experiment::phase_sweep:
            extra = {"state", "n",   "sign",        "alpha", "squeeze", "thermal-x", "twin-table",
                     "n-max", "phi", "subtraction", "theta", "t1",      "t2"};
            break;
        case Experiment::loss_sweep:
            extra = {"n", "t", "phi"};
            break;
        case Experiment::n_scaling:
            extra = {"state", "sign", "n-list", "phi"};
            break;
        case Experiment::table1:
            extra = {"n", "alpha", "squeeze", "phi"};
            break;
        case Experiment::protocol_compare:
            extra = {"state", "n", "sign", "alpha", "squeeze", "thermal-x", "twin-table", "n-max", "theta"};
            break;
    }
    keys.insert(keys.end(), extra.begin(), extra.end());
    return keys;
}

Settings parse_config_text(std::string_view text, const std::string &source, Experiment experiment) {
    std::set<std::string> all_keys;
    for (Experiment e : kExperiments) {
        for (const std::string &k : known_keys(e)) {
            all_keys.insert(k);
        }
    }
    std::vector<std::string> active_keys = known_keys(experiment);
    auto is_active = [&](const std::string &k) {
        return std::find(active_keys.begin(), active_keys.end(), k) != active_keys.end();
    };

    Settings global;
    Settings section_settings;
    std::optional<Experiment> section;
    std::set<std::pair<std::string, std::string>> seen;  // (section, key)
    std::string section_name;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string origin = fmt::format("{}:{}", source, line_no);
        std::string_view line = raw;
        auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin, "[section]", "unterminated section header");
            }
            std::string_view name = trim(line.substr(1, line.size() - 2));
            section = experiment_from_command(name);
            if (!section) {
                throw ConfigError(origin, std::string(name), "unknown section (expected an experiment name)");
            }
            section_name = command_name(*section);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(origin, std::string(line), "expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(unquote(trim(line.substr(eq + 1))));
        if (key.empty()) {
            throw ConfigError(origin, "", "missing key before '='");
        }
        if (value.empty()) {
            throw ConfigError(origin, key, "missing value");
        }
        if (!seen.insert({section_name, key}).second) {
            throw ConfigError(origin, key, "duplicate key");
        }
        if (section) {
            auto keys = known_keys(*section);
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                throw ConfigError(origin, key, fmt::format("unknown key for [{}]", section_name));
            }
            if (*section == experiment) {
                section_settings[key] = {value, origin};
            }
        } else {
            if (!all_keys.count(key)) {
                throw ConfigError(origin, key, "unknown key");
            }
            if (is_active(key)) {
                global[key] = {value, origin};
            }
        }
    }
    for (auto &[k, v] : section_settings) {
        global[k] = v;
    }
    return global;
}

Settings load_config_file(const std::string &path, Experiment experiment) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path, "--config", "cannot open configuration file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path, experiment);
}

void SweepConfig::validate() const {
    switch (experiment) {
        case Experiment::phase_sweep:
        case Experiment::n_scaling:
        case Experiment::table1:
            require_strictly_increasing(phis, "phi");
            break;
        case Experiment::loss_sweep:
            require_strictly_increasing(transmissions, "t");
            for (double t : transmissions) {
                if (!(t > 0 && t <= 1)) {
                    throw ConfigError("", "t", fmt::format("transmission {} outside (0, 1]", t));
                }
            }
            break;
        case Experiment::protocol_compare:
            break;
    }
    if (experiment == Experiment::n_scaling) {
        if (photon_numbers.empty()) {
            throw ConfigError("", "n-list", "grid is empty");
        }
        for (std::size_t i = 0; i < photon_numbers.size(); ++i) {
            if (photon_numbers[i] < 1) {
                throw ConfigError("", "n-list", fmt::format("photon number {} must be >= 1", photon_numbers[i]));
            }
            if (i > 0 && photon_numbers[i] <= photon_numbers[i - 1]) {
                throw ConfigError("", "n-list", "grid must be strictly increasing");
            }
        }
    }
    if (uses_subtraction(*this) && !(theta > 0 && theta <= 0.1)) {
        throw ConfigError("", "theta", fmt::format("tap angle {} outside (0, 0.1]", theta));
    }
    if (!(tolerance > 0)) {
        throw ConfigError("", "tolerance", "must be positive");
    }
    if (jobs > 1024) {
        throw ConfigError("", "jobs", fmt::format("{} workers exceeds the limit of 1024", jobs));
    }
    if (out_dir.empty()) {
        throw ConfigError("", "out", "output directory is empty");
    }
}

SweepConfig make_config(Experiment e, const Settings &settings) {
    auto keys = known_keys(e);
    for (const auto &[key, setting] : settings) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError(setting.origin, key, fmt::format("not accepted by {}", command_name(e)));
        }
    }

    // Converts one setting, attaching the origin to any parse failure.
    auto get = [&](const std::string &key, auto convert) -> std::optional<decltype(convert(std::string_view{}))> {
        auto it = settings.find(key);
        if (it == settings.end()) {
            return std::nullopt;
        }
        try {
            return convert(std::string_view(it->second.value));
        } catch (const ConfigError &) {
            throw;
        } catch (const std::exception &ex) {
            throw ConfigError(it->second.origin, key, ex.what());
        }
    };
    auto real = [](std::string_view s) { return parse_real(s); };
    auto integer = [](std::string_view s) { return static_cast<int>(parse_integer(s)); };
    auto text = [](std::string_view s) { return std::string(s); };

    SweepConfig c;
    c.experiment = e;
    const std::string default_phi = "linspace(-pi/2, pi/2, 181)";

    switch (e) {
        case Experiment::phase_sweep:
            c.state = InputStateSpec::subtracted_twin(10, HeraldSign::plus);
            break;
        case Experiment::loss_sweep:
            c.state = InputStateSpec::subtracted_twin(10, HeraldSign::plus);
            c.transmissions = {0.9, 0.95, 0.99, 1.0};
            c.phis = {0.0};
            break;
        case Experiment::n_scaling:
            c.state = InputStateSpec::subtracted_twin(1, HeraldSign::plus);
            c.photon_numbers = parse_int_grid("range(1, 20)");
            break;
        case Experiment::table1:
            c.state.n = 8;
            c.state.alpha = std::sqrt(8.0);
            c.state.squeezing = 1;
            break;
        case Experiment::protocol_compare:
            c.state = InputStateSpec::twin_fock(5);
            break;
    }
    if (e != Experiment::loss_sweep && e != Experiment::protocol_compare) {
        c.phis = parse_real_grid(default_phi);
    }

    if (auto v = get("state", [](std::string_view s) { return parse_state_kind(s); })) {
        c.state.kind = *v;
        if (*v == StateKind::opo_mixture && !settings.count("thermal-x") && !settings.count("twin-table")) {
            c.state.thermal_x = 0.5;
        }
    }
    if (auto v = get("n", integer)) c.state.n = *v;
    if (auto v = get("sign", [](std::string_view s) { return parse_herald_sign(s); })) c.state.sign = *v;
    if (auto v = get("alpha", real)) c.state.alpha = *v;
    if (auto v = get("squeeze", real)) c.state.squeezing = *v;
    if (auto v = get("thermal-x", real)) c.state.thermal_x = *v;
    if (auto v = get("twin-table", [](std::string_view s) { return parse_twin_table(s); })) c.state.twin_table = *v;
    if (auto v = get("n-max", integer)) c.state.n_max = *v;
    if (auto v = get("n-list", [](std::string_view s) { return parse_int_grid(s); })) c.photon_numbers = *v;
    if (auto v = get("t", [](std::string_view s) { return parse_real_grid(s); })) c.transmissions = *v;
    if (e == Experiment::loss_sweep) {
        if (auto v = get("phi", real)) c.phis = {*v};
    } else if (auto v = get("phi", [](std::string_view s) { return parse_real_grid(s); })) {
        c.phis = *v;
    }
    if (auto v = get("subtraction", [](std::string_view s) { return parse_subtraction(s); })) c.subtraction = *v;
    if (auto v = get("theta", real)) c.theta = *v;

    auto t1 = get("t1", real);
    auto t2 = get("t2", real);
    if (t1 || t2) {
        try {
            c.loss = LossSpec(t1.value_or(1.0), t2.value_or(1.0));
        } catch (const std::exception &ex) {
            const std::string key = settings.count("t1") ? "t1" : "t2";
            throw ConfigError(settings.at(key).origin, key, ex.what());
        }
    }

    if (auto v = get("out", text)) c.out_dir = *v;
    if (auto v = get("format", [](std::string_view s) {
            if (s == "csv") return OutputFormat::csv;
            if (s == "json") return OutputFormat::json;
            throw std::invalid_argument(fmt::format("unknown format '{}' (expected csv or json)", s));
        })) {
        c.format = *v;
    }
    if (auto v = get("strict", [](std::string_view s) { return parse_bool(s); })) c.strict = *v;
    if (auto v = get("tolerance", real)) c.tolerance = *v;
    if (auto v = get("jobs", [](std::string_view s) {
            long long j = parse_integer(s);
            if (j < 0) throw std::invalid_argument("jobs must be >= 0");
            return static_cast<unsigned>(j);
        })) {
        c.jobs = *v;
    }
    if (auto v = get("seed", [](std::string_view s) {
            long long j = parse_integer(s);
            if (j < 0) throw std::invalid_argument("seed must be >= 0");
            return static_cast<std::uint64_t>(j);
        })) {
        c.seed = *v;
    }

    auto origin_of = [&](const std::string &field) {
        auto it = settings.find(field);
        return it == settings.end() ? std::string("default") : it->second.origin;
    };
    try {
        c.validate();
    } catch (const ConfigError &err) {
        throw ConfigError(origin_of(err.field()), err.field(), err.message());
    }
    try {
        if (e == Experiment::phase_sweep || e == Experiment::protocol_compare) {
            c.state.validate();
        }
    } catch (const std::exception &ex) {
        throw ConfigError(origin_of("state"), "state", ex.what());
    }
    if (e == Experiment::loss_sweep && c.state.n < 1) {
        throw ConfigError(origin_of("n"), "n", "photon number must be >= 1");
    }
    if (e == Experiment::table1 && (c.state.n < 1 || std::abs(c.state.alpha) == 0 || c.state.squeezing < 0)) {
        throw ConfigError(origin_of("n"), "n", "table1 needs n >= 1, alpha != 0 and squeeze >= 0");
    }
    if (e == Experiment::n_scaling) {
        switch (c.state.kind) {
            case StateKind::coherent_vacuum:
            case StateKind::coherent_squeezed:
            case StateKind::opo_mixture:
                throw ConfigError(origin_of("state"), "state", "n-scaling needs a photon-number state");
            default:
                break;
        }
    }
    return c;
}

}  // namespace twinsub::cli
