// SPDX-License-Identifier: Apache-2.0
//
// ssbsense: bistatic passive sensing with 5G NR SSB beam sweeps
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ssbsense/harness.hpp"

namespace
{
    using namespace ssbsense;

    struct Options
    {
        std::string config_path;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials;
        std::string out;
        std::optional<double> calibrate_pd;
        std::optional<double> snr_db;
    };

    ExperimentConfig resolve(const Options &o, const std::string &experiment)
    {
        nlohmann::json j = nlohmann::json::object();
        if (!o.config_path.empty())
        {
            std::ifstream in(o.config_path);
            if (!in)
                throw std::runtime_error("cannot open config file " + o.config_path);
            try
            {
                in >> j;
            }
            catch (const nlohmann::json::exception &e)
            {
                throw ConfigError("invalid JSON in " + o.config_path + ": " + e.what());
            }
        }
        if (j.contains("experiment") && j["experiment"] != experiment)
            throw ConfigError("config is for experiment '" + j["experiment"].get<std::string>() + "', not '" +
                              experiment + "'");
        j["experiment"] = experiment;

        ExperimentConfig cfg;
        try
        {
            cfg = config_from_json(j);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("bad config value: ") + e.what());
        }

        // --seed, then the config file, then SSBSENSE_SEED, then the built-in default.
        if (o.seed)
            cfg.seed = *o.seed;
        else if (!j.contains("seed"))
        {
            if (const char *env = std::getenv("SSBSENSE_SEED"))
            {
                try
                {
                    cfg.seed = std::stoull(env);
                }
                catch (const std::exception &)
                {
                    throw ConfigError(std::string("SSBSENSE_SEED is not an unsigned integer: ") + env);
                }
            }
        }
        if (o.trials)
            cfg.trials = *o.trials;
        if (o.calibrate_pd)
            cfg.calibrate_pd = *o.calibrate_pd;
        if (o.snr_db)
            cfg.detect_snr_db = *o.snr_db;
        cfg.validate();
        return cfg;
    }

    void emit(const Options &o, const std::string &text)
    {
        if (o.out.empty() || o.out == "-")
            std::cout << text;
        else
            write_text_file(o.out, text);
    }

    void add_common(CLI::App *sub, Options &o)
    {
        sub->add_option("-c,--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("-s,--seed", o.seed, "Master RNG seed");
        sub->add_option("-o,--out", o.out, "Output CSV path (default: stdout)");
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Passive range/velocity sensing with SSB beam sweeps"};
    app.set_version_flag("--version", std::string(ssbsense::kVersion));
    app.require_subcommand(1);

    Options o;
    auto *crb = app.add_subcommand("crb", "Closed-form lower-bound curves");
    add_common(crb, o);

    auto *rmse = app.add_subcommand("rmse", "Monte Carlo estimator RMSE versus the bound");
    add_common(rmse, o);
    rmse->add_option("-n,--trials", o.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);

    auto *det = app.add_subcommand("detect", "Detection and false-alarm rates versus beam deactivation");
    add_common(det, o);
    det->add_option("-n,--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    det->add_option("--snr-db", o.snr_db, "Receive SNR of the best beam in dB");
    det->add_option("--calibrate-pd", o.calibrate_pd, "Search the SNR giving this Pd with all beams active")
        ->check(CLI::Range(0.0, 1.0));

    std::string mask_out;
    auto *mask = app.add_subcommand("mask", "Print the default SSB resource mask");
    mask->add_option("-o,--out", mask_out, "Output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (mask->parsed())
        {
            const std::string text = format_mask(default_ssb_mask(OfdmFrameConfig{}));
            if (mask_out.empty())
                std::cout << text;
            else
                write_text_file(mask_out, text);
            return 0;
        }

        const std::string experiment = crb->parsed() ? "crb" : rmse->parsed() ? "rmse" : "detect";
        const ExperimentConfig cfg = resolve(o, experiment);
        CsvTable table;
        if (experiment == "crb")
            table = to_table(run_crb_curves(cfg));
        else if (experiment == "rmse")
            table = to_table(run_rmse_experiment(cfg));
        else
        {
            const DetectionRun run = run_detection_sweep(cfg);
            table = to_table(run.rows);
            table.metadata["snr_db"] = run.snr_db;
        }
        nlohmann::json meta = output_metadata(cfg);
        meta.update(table.metadata);
        table.metadata = meta;
        emit(o, emit_csv(table));
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "ssbsense_cli: error: " << e.what() << '\n';
        return 2;
    }
}
