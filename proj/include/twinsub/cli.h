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

#ifndef TWINSUB_CLI_H
#define TWINSUB_CLI_H

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twinsub/catalog.h"
#include "twinsub/optics.h"

namespace twinsub::cli {

inline constexpr const char *kVersion = "1.0.0";
inline constexpr const char *kCsvSchema = "# twinsub-csv v1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStrict = 3;

enum class Experiment { phase_sweep, loss_sweep, n_scaling, table1, protocol_compare };
enum class OutputFormat { csv, json };
enum class SubtractionMode { none, bucket, coherent_plus, coherent_minus };

std::string to_string(Experiment e);
/// Subcommand spelling, e.g. "phase-sweep".
std::string command_name(Experiment e);
std::string to_string(SubtractionMode mode);

/// A bad setting together with where it came from.
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string origin, std::string field, const std::string &message);

    const std::string &origin() const {
        return origin_;
    }
    const std::string &field() const {
        return field_;
    }
    const std::string &message() const {
        return message_;
    }

   private:
    std::string origin_;
    std::string field_;
    std::string message_;
};

/// Raw value of one key plus its origin, e.g. "run.conf:7" or "--theta".
struct Setting {
    std::string value;
    std::string origin;
};
using Settings = std::map<std::string, Setting>;

/// Parses the declarative config format:
///   # comment
///   key = value          (applies to every experiment)
///   [phase-sweep]        (following keys apply to that experiment only)
/// Sections other than `experiment` are skipped. Throws ConfigError with the line number.
Settings parse_config_text(std::string_view text, const std::string &source, Experiment experiment);
Settings load_config_file(const std::string &path, Experiment experiment);

/// Real grids: "0.1, 0.2, 0.5" or "linspace(a, b, count)". Scalars accept "pi",
/// "-pi/2", "3*pi/4" and "sqrt(8)".
double parse_real(std::string_view text);
std::vector<double> parse_real_grid(std::string_view text);
/// Integer grids: "2, 4, 8" or "range(first, last[, step])", inclusive.
std::vector<int> parse_int_grid(std::string_view text);

struct SweepConfig {
    Experiment experiment = Experiment::phase_sweep;
    InputStateSpec state;
    std::vector<double> phis;
    std::vector<double> transmissions;
    std::vector<int> photon_numbers;
    std::optional<LossSpec> loss;
    SubtractionMode subtraction = SubtractionMode::none;
    double theta = 0.01;
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::csv;
    bool strict = false;
    double tolerance = 1e-9;
    unsigned jobs = 0;  // 0 selects the number of hardware threads
    std::uint64_t seed = 0;  // reserved

    /// Throws ConfigError when a grid is empty or not strictly increasing, or theta leaves (0, 0.1].
    void validate() const;
};

/// Keys a given experiment accepts.
std::vector<std::string> known_keys(Experiment e);

/// Typed conversion with experiment defaults. Throws ConfigError naming the field and origin.
SweepConfig make_config(Experiment e, const Settings &settings);

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Column {
    std::string name;
    std::string module;     // producing module, "input" for swept parameters
    std::string operation;  // producing operation or reference formula
    std::string path;       // "parameter", "numeric", "analytic", "closed_form" or "reference"
};

struct StrictReport {
    std::size_t comparisons = 0;
    double max_discrepancy = 0;
    std::vector<std::string> failures;
};

struct ExperimentResult {
    Experiment experiment;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    StrictReport strict;
};

ExperimentResult run_experiment(const SweepConfig &config);

std::string format_csv(const ExperimentResult &result);
std::string format_json(const ExperimentResult &result);

/// FNV-1a over the resolved "key=value" lines in key order.
std::uint64_t config_hash(const Settings &settings);
std::string manifest_json(const SweepConfig &config, const Settings &settings, const ExperimentResult &result,
                          const std::vector<std::string> &files);

/// Runs the experiment and writes its artifacts. Returns kExitStrict when strict
/// comparisons failed, kExitOk otherwise.
int run(const SweepConfig &config, const Settings &settings, std::ostream &log);

/// Command-line entry point.
int main_entry(int argc, char **argv);

}  // namespace twinsub::cli

#endif
