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
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "twinsub/cli.h"

namespace twinsub::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_cell(const Cell &cell) {
    struct Visitor {
        std::string operator()(std::monostate) const {
            return "";
        }
        std::string operator()(double v) const {
            return fmt::format("{:.17g}", v);
        }
        std::string operator()(long long v) const {
            return fmt::format("{}", v);
        }
        std::string operator()(const std::string &s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) {
                return s;
            }
            std::string quoted = "\"";
            for (char ch : s) {
                quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            }
            return quoted + "\"";
        }
    };
    return std::visit(Visitor{}, cell);
}

// Non-finite reals are written as the strings "inf", "-inf" and "nan".
ordered_json json_cell(const Cell &cell) {
    struct Visitor {
        ordered_json operator()(std::monostate) const {
            return nullptr;
        }
        ordered_json operator()(double v) const {
            if (std::isfinite(v)) {
                return v;
            }
            return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
        }
        ordered_json operator()(long long v) const {
            return v;
        }
        ordered_json operator()(const std::string &s) const {
            return s;
        }
    };
    return std::visit(Visitor{}, cell);
}

std::string output_file_name(const SweepConfig &config) {
    return to_string(config.experiment) + (config.format == OutputFormat::csv ? ".csv" : ".json");
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    }
    out << content;
    if (!out) {
        throw std::runtime_error(fmt::format("failed while writing {}", path.string()));
    }
}

}  // namespace

std::string format_csv(const ExperimentResult &result) {
    std::string out = std::string(kCsvSchema) + "\n";
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
        out += (i ? "," : "") + result.columns[i].name;
    }
    out += "\n";
    for (const auto &row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + csv_cell(row[i]);
        }
        out += "\n";
    }
    return out;
}

std::string format_json(const ExperimentResult &result) {
    ordered_json doc;
    doc["schema"] = "twinsub-json v1";
    doc["experiment"] = to_string(result.experiment);
    ordered_json columns = ordered_json::array();
    for (const Column &c : result.columns) {
        columns.push_back(c.name);
    }
    doc["columns"] = columns;
    ordered_json rows = ordered_json::array();
    for (const auto &row : result.rows) {
        ordered_json entry = ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            entry[result.columns[i].name] = json_cell(row[i]);
        }
        rows.push_back(entry);
    }
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
}

std::uint64_t config_hash(const Settings &settings) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const auto &[key, setting] : settings) {
        for (char ch : key + "=" + setting.value + "\n") {
            hash ^= static_cast<unsigned char>(ch);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

std::string manifest_json(const SweepConfig &config, const Settings &settings, const ExperimentResult &result,
                          const std::vector<std::string> &files) {
    ordered_json doc;
    doc["schema"] = "twinsub-manifest v1";
    doc["tool"] = "twinsub";
    doc["version"] = kVersion;
    doc["libraries"] = {
        {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION},
        {"fmt", FMT_VERSION},
    };
    doc["experiment"] = to_string(config.experiment);
    doc["config_hash"] = fmt::format("fnv1a64:{:016x}", config_hash(settings));
    ordered_json resolved = ordered_json::object();
    for (const auto &[key, setting] : settings) {
        resolved[key] = {{"value", setting.value}, {"origin", setting.origin}};
    }
    doc["settings"] = resolved;
    doc["outputs"] = files;
    ordered_json columns = ordered_json::array();
    for (const Column &c : result.columns) {
        columns.push_back({{"name", c.name}, {"module", c.module}, {"operation", c.operation}, {"path", c.path}});
    }
    doc["columns"] = columns;
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
        ordered_json parameters = ordered_json::object();
        for (std::size_t i = 0; i < result.columns.size(); ++i) {
            if (result.columns[i].path == "parameter") {
                parameters[result.columns[i].name] = json_cell(result.rows[r][i]);
            }
        }
        rows.push_back({{"index", r}, {"parameters", parameters}});
    }
    doc["rows"] = rows;
    doc["strict"] = {
        {"enabled", config.strict},
        {"tolerance", config.tolerance},
        {"comparisons", result.strict.comparisons},
        {"max_discrepancy", result.strict.max_discrepancy},
        {"failures", result.strict.failures},
    };
    return doc.dump(2) + "\n";
}

int run(const SweepConfig &config, const Settings &settings, std::ostream &log) {
    ExperimentResult result = run_experiment(config);
    std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    std::string data_name = output_file_name(config);
    write_file(dir / data_name,
               config.format == OutputFormat::csv ? format_csv(result) : format_json(result));
    write_file(dir / "manifest.json", manifest_json(config, settings, result, {data_name}));
    log << fmt::format("{}: {} rows written to {}\n", to_string(config.experiment), result.rows.size(),
                       (dir / data_name).string());
    if (config.strict) {
        log << fmt::format("strict: {} comparisons, max discrepancy {:.3g}, tolerance {:.3g}\n",
                           result.strict.comparisons, result.strict.max_discrepancy, config.tolerance);
        if (!result.strict.failures.empty()) {
            for (const std::string &f : result.strict.failures) {
                log << "strict failure: " << f << "\n";
            }
            return kExitStrict;
        }
    }
    return kExitOk;
}

int main_entry(int argc, char **argv) {
    CLI::App app{"Photon-subtracted twin-beam interferometry simulator", "twinsub"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    const std::vector<std::pair<Experiment, const char *>> commands{
        {Experiment::phase_sweep, "Sweep the interferometer phase for one input state"},
        {Experiment::loss_sweep, "Sweep symmetric transmission for the subtracted twin state"},
        {Experiment::n_scaling, "Phase error and QCRB against photon number"},
        {Experiment::table1, "Compare catalog states with their reference table entries"},
        {Experiment::protocol_compare, "Compare bucket and coherent subtraction protocols"},
    };
    struct Parsed {
        CLI::App *app;
        std::string config_path;
        bool strict = false;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option *> options;
    };
    std::map<Experiment, Parsed> parsed;
    for (const auto &[e, description] : commands) {
        Parsed &p = parsed[e];
        p.app = app.add_subcommand(command_name(e), description);
        p.app->add_option("--config", p.config_path, "Configuration file (key = value lines)");
        for (const std::string &key : known_keys(e)) {
            if (key == "strict") {
                p.options[key] = p.app->add_flag("--strict", p.strict, "Exit with code 3 on numeric/analytic mismatch");
            } else {
                p.options[key] = p.app->add_option("--" + key, p.values[key], fmt::format("Override '{}'", key));
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    for (const auto &[e, description] : commands) {
        Parsed &p = parsed[e];
        if (!p.app->parsed()) {
            continue;
        }
        try {
            Settings settings;
            if (!p.config_path.empty()) {
                settings = load_config_file(p.config_path, e);
            }
            for (const auto &[key, option] : p.options) {
                if (option->count() == 0) {
                    continue;
                }
                settings[key] = {key == "strict" ? std::string(p.strict ? "true" : "false") : p.values[key],
                                 "--" + key};
            }
            SweepConfig config = make_config(e, settings);
            return run(config, settings, std::cout);
        } catch (const ConfigError &err) {
            std::cerr << "configuration error: " << err.what() << "\n";
            return kExitConfig;
        } catch (const std::exception &err) {
            std::cerr << "error: " << err.what() << "\n";
            return kExitRuntime;
        }
    }
    return kExitConfig;
}

}  // namespace twinsub::cli
