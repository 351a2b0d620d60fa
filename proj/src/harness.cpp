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

#include "ssbsense/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include "ssbsense/parallel.hpp"

namespace ssbsense
{
    using nlohmann::json;

    std::string to_string(MaskMode m) { return m == MaskMode::Full ? "full" : "ssb"; }

    MaskMode parse_mask_mode(const std::string &s)
    {
        if (s == "full")
            return MaskMode::Full;
        if (s == "ssb")
            return MaskMode::Ssb;
        throw ConfigError("unknown mask mode '" + s + "' (expected full or ssb)");
    }

    namespace
    {
        std::string amplitude_name(AmplitudeModel m) { return m == AmplitudeModel::Swerling1 ? "swerling1" : "constant"; }

        AmplitudeModel parse_amplitude(const std::string &s)
        {
            if (s == "swerling1")
                return AmplitudeModel::Swerling1;
            if (s == "constant")
                return AmplitudeModel::ConstantModulus;
            throw ConfigError("unknown amplitude model '" + s + "' (expected swerling1 or constant)");
        }

        AmplitudeModel default_amplitude(const std::string &experiment)
        {
            return experiment == "rmse" ? AmplitudeModel::ConstantModulus : AmplitudeModel::Swerling1;
        }

        void check_keys(const json &j, const char *where, std::initializer_list<const char *> allowed)
        {
            if (!j.is_object())
                throw ConfigError(std::string(where) + " must be a JSON object");
            std::set<std::string> ok(allowed.begin(), allowed.end());
            for (const auto &[k, _] : j.items())
                if (!ok.count(k))
                    throw ConfigError("unknown key '" + k + "' in " + where);
        }

        template <typename T>
        void read(const json &j, const char *key, T &out)
        {
            if (j.contains(key))
                out = j.at(key).get<T>();
        }

        std::vector<std::pair<std::size_t, std::size_t>> read_pairs(const json &j)
        {
            std::vector<std::pair<std::size_t, std::size_t>> out;
            for (const auto &p : j)
            {
                if (!p.is_array() || p.size() != 2)
                    throw ConfigError("expected a list of [a, b] pairs");
                out.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
            }
            return out;
        }

        json write_pairs(const std::vector<std::pair<std::size_t, std::size_t>> &v)
        {
            json out = json::array();
            for (const auto &[a, b] : v)
                out.push_back({a, b});
            return out;
        }
    }

    SsbMask ExperimentConfig::mask(MaskMode mode) const
    {
        if (mode == MaskMode::Full)
            return SsbMask::full(ofdm);
        if (mask_file)
            return load_mask_file(*mask_file, ofdm.n_subcarriers, ofdm.n_symbols);
        return default_ssb_mask(ofdm);
    }

    ScenarioTemplate ExperimentConfig::scenario(double snr_db, AmplitudeModel fallback) const
    {
        ScenarioTemplate t;
        t.snr_db = snr_db;
        t.noise_power = noise_power_w();
        t.rcs = db2lin(rcs_dbsm);
        t.amplitude = amplitude.value_or(fallback);
        t.sector = sector;
        t.noiseless = noiseless;
        t.fixed_target = fixed_target;
        return t;
    }

    void ExperimentConfig::validate() const
    {
        if (experiment != "crb" && experiment != "rmse" && experiment != "detect")
            throw ConfigError("experiment must be crb, rmse or detect, got '" + experiment + "'");
        if (trials < 1)
            throw ConfigError("trials must be at least 1");
        ofdm.validate();
        array.validate();
        if (experiment != "crb")
        {
            if (!array.is_square())
                throw ConfigError("experiments need a square array");
            profile().validate_for(ofdm);
            for (const auto &[nf, lf] : fft_sizes)
                ProfileConfig{nf, lf}.validate_for(ofdm);
        }
        for (double f : fractions)
            DeactivationPolicy{f, 0}.validate();
        if (calibrate_pd && !(*calibrate_pd > 0.0 && *calibrate_pd < 1.0))
            throw ConfigError("calibrate_pd must lie in (0, 1)");
        if (!(sector.max_azimuth > 0.0 && sector.max_azimuth < kPi / 2) ||
            !(sector.min_elevation > -kPi / 2 && sector.min_elevation <= sector.max_elevation &&
              sector.max_elevation < kPi / 2))
            throw ConfigError("target sector must lie strictly inside (-90, 90) degrees");
    }

    ExperimentConfig config_from_json(const json &j)
    {
        check_keys(j, "config", {"experiment", "seed", "trials", "ofdm", "array", "profile", "detection_threshold",
                                 "scene", "crb", "rmse", "detect"});
        ExperimentConfig c;
        read(j, "experiment", c.experiment);
        read(j, "seed", c.seed);
        read(j, "trials", c.trials);
        read(j, "detection_threshold", c.detection_threshold);

        if (j.contains("ofdm"))
        {
            const json &o = j["ofdm"];
            check_keys(o, "ofdm", {"n_subcarriers", "n_symbols", "subcarrier_spacing_hz", "carrier_hz", "cp_fraction"});
            read(o, "n_subcarriers", c.ofdm.n_subcarriers);
            read(o, "n_symbols", c.ofdm.n_symbols);
            read(o, "subcarrier_spacing_hz", c.ofdm.subcarrier_spacing);
            read(o, "carrier_hz", c.ofdm.carrier);
            double cp_fraction = 0.07;
            read(o, "cp_fraction", cp_fraction);
            if (!(c.ofdm.subcarrier_spacing > 0.0))
                throw ConfigError("subcarrier spacing must be positive");
            c.ofdm.cyclic_prefix = cp_fraction / c.ofdm.subcarrier_spacing;
        }
        if (j.contains("array"))
        {
            check_keys(j["array"], "array", {"m_h", "m_v"});
            read(j["array"], "m_h", c.array.m_h);
            read(j["array"], "m_v", c.array.m_v);
        }
        if (j.contains("profile"))
        {
            const json &p = j["profile"];
            check_keys(p, "profile", {"n_fft_factor", "l_fft_factor", "statistic", "aggregation_threshold"});
            read(p, "n_fft_factor", c.n_fft_factor);
            read(p, "l_fft_factor", c.l_fft_factor);
            if (p.contains("statistic"))
                c.statistic = parse_paf_statistic(p["statistic"].get<std::string>());
            read(p, "aggregation_threshold", c.aggregation_threshold);
        }
        if (j.contains("scene"))
        {
            const json &s = j["scene"];
            check_keys(s, "scene", {"noise_power_dbm", "rcs_dbsm", "amplitude_model", "max_azimuth_deg",
                                    "min_elevation_deg", "max_elevation_deg", "noiseless", "target", "mask_file"});
            read(s, "noise_power_dbm", c.noise_power_dbm);
            read(s, "rcs_dbsm", c.rcs_dbsm);
            if (s.contains("amplitude_model"))
                c.amplitude = parse_amplitude(s["amplitude_model"].get<std::string>());
            if (s.contains("max_azimuth_deg"))
                c.sector.max_azimuth = deg2rad(s["max_azimuth_deg"].get<double>());
            if (s.contains("min_elevation_deg"))
                c.sector.min_elevation = deg2rad(s["min_elevation_deg"].get<double>());
            if (s.contains("max_elevation_deg"))
                c.sector.max_elevation = deg2rad(s["max_elevation_deg"].get<double>());
            read(s, "noiseless", c.noiseless);
            if (s.contains("target"))
            {
                const json &t = s["target"];
                check_keys(t, "scene.target", {"range_m", "velocity_mps", "azimuth_deg", "elevation_deg"});
                FixedTarget ft;
                read(t, "range_m", ft.range);
                read(t, "velocity_mps", ft.velocity);
                double az = 0.0, el = 0.0;
                read(t, "azimuth_deg", az);
                read(t, "elevation_deg", el);
                ft.azimuth = deg2rad(az);
                ft.elevation = deg2rad(el);
                c.fixed_target = ft;
            }
            if (s.contains("mask_file"))
                c.mask_file = std::filesystem::path(s["mask_file"].get<std::string>());
        }
        if (j.contains("crb"))
        {
            check_keys(j["crb"], "crb", {"blocks", "snr_db"});
            if (j["crb"].contains("blocks"))
                c.crb_blocks = read_pairs(j["crb"]["blocks"]);
            read(j["crb"], "snr_db", c.crb_snr_db);
        }
        if (j.contains("rmse"))
        {
            const json &r = j["rmse"];
            check_keys(r, "rmse", {"snr_db", "masks", "fft_sizes"});
            read(r, "snr_db", c.rmse_snr_db);
            if (r.contains("masks"))
            {
                c.rmse_masks.clear();
                for (const auto &m : r["masks"])
                    c.rmse_masks.push_back(parse_mask_mode(m.get<std::string>()));
            }
            if (r.contains("fft_sizes"))
                c.fft_sizes = read_pairs(r["fft_sizes"]);
        }
        if (j.contains("detect"))
        {
            const json &d = j["detect"];
            check_keys(d, "detect", {"snr_db", "gammas", "fractions", "calibrate_pd"});
            read(d, "snr_db", c.detect_snr_db);
            read(d, "gammas", c.gammas);
            read(d, "fractions", c.fractions);
            if (d.contains("calibrate_pd") && !d["calibrate_pd"].is_null())
                c.calibrate_pd = d["calibrate_pd"].get<double>();
        }
        return c;
    }

    json config_to_json(const ExperimentConfig &c)
    {
        json j;
        j["experiment"] = c.experiment;
        j["seed"] = c.seed;
        j["trials"] = c.trials;
        j["detection_threshold"] = c.detection_threshold;
        j["ofdm"] = {{"n_subcarriers", c.ofdm.n_subcarriers},
                     {"n_symbols", c.ofdm.n_symbols},
                     {"subcarrier_spacing_hz", c.ofdm.subcarrier_spacing},
                     {"carrier_hz", c.ofdm.carrier},
                     {"cp_fraction", c.ofdm.cyclic_prefix * c.ofdm.subcarrier_spacing}};
        j["array"] = {{"m_h", c.array.m_h}, {"m_v", c.array.m_v}};
        j["profile"] = {{"n_fft_factor", c.n_fft_factor},
                        {"l_fft_factor", c.l_fft_factor},
                        {"statistic", to_string(c.statistic)},
                        {"aggregation_threshold", c.aggregation_threshold}};

        json s = {{"noise_power_dbm", c.noise_power_dbm},
                  {"rcs_dbsm", c.rcs_dbsm},
                  {"amplitude_model", amplitude_name(c.amplitude.value_or(default_amplitude(c.experiment)))},
                  {"max_azimuth_deg", rad2deg(c.sector.max_azimuth)},
                  {"min_elevation_deg", rad2deg(c.sector.min_elevation)},
                  {"max_elevation_deg", rad2deg(c.sector.max_elevation)},
                  {"noiseless", c.noiseless}};
        if (c.fixed_target)
            s["target"] = {{"range_m", c.fixed_target->range},
                           {"velocity_mps", c.fixed_target->velocity},
                           {"azimuth_deg", rad2deg(c.fixed_target->azimuth)},
                           {"elevation_deg", rad2deg(c.fixed_target->elevation)}};
        if (c.mask_file)
            s["mask_file"] = c.mask_file->string();
        j["scene"] = s;

        j["crb"] = {{"blocks", write_pairs(c.crb_blocks)}, {"snr_db", c.crb_snr_db}};
        json masks = json::array();
        for (auto m : c.rmse_masks)
            masks.push_back(to_string(m));
        j["rmse"] = {{"snr_db", c.rmse_snr_db}, {"masks", masks}, {"fft_sizes", write_pairs(c.fft_sizes)}};
        j["detect"] = {{"snr_db", c.detect_snr_db}, {"gammas", c.gammas}, {"fractions", c.fractions}};
        j["detect"]["calibrate_pd"] = c.calibrate_pd ? json(*c.calibrate_pd) : json(nullptr);
        return j;
    }

    ExperimentConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file " + path.string());
        json j;
        try
        {
            in >> j;
        }
        catch (const json::exception &e)
        {
            throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
        }
        try
        {
            return config_from_json(j);
        }
        catch (const json::exception &e)
        {
            throw ConfigError("bad value in " + path.string() + ": " + e.what());
        }
    }

    std::string config_hash(const ExperimentConfig &cfg)
    {
        const std::string canonical = config_to_json(cfg).dump();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : canonical)
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    // ----- CSV ----------------------------------------------------------------

    std::string format_double(double x)
    {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    }

    std::string emit_csv(const CsvTable &table)
    {
        std::string out = "# " + table.metadata.dump() + "\n";
        auto join = [&out](const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
            {
                if (i)
                    out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        join(table.header);
        for (const auto &r : table.rows)
        {
            if (r.size() != table.header.size())
                throw std::logic_error("CSV row width differs from header");
            join(r);
        }
        return out;
    }

    CsvTable parse_csv(const std::string &text)
    {
        CsvTable t;
        std::istringstream in(text);
        std::string line;
        bool have_header = false;
        auto split = [](const std::string &s) {
            std::vector<std::string> cells;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = s.find(',', start);
                cells.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
                if (pos == std::string::npos)
                    break;
                start = pos + 1;
            }
            return cells;
        };
        while (std::getline(in, line))
        {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            if (line[0] == '#')
            {
                const auto brace = line.find('{');
                if (brace != std::string::npos)
                    t.metadata = json::parse(line.substr(brace));
                continue;
            }
            if (!have_header)
            {
                t.header = split(line);
                have_header = true;
                continue;
            }
            auto cells = split(line);
            if (cells.size() != t.header.size())
                throw ConfigError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
        return t;
    }

    namespace
    {
        double to_d(const std::string &s)
        {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw ConfigError("not a number: '" + s + "'");
            return v;
        }

        std::size_t to_u(const std::string &s)
        {
            std::size_t v = 0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw ConfigError("not an integer: '" + s + "'");
            return v;
        }

        std::size_t column(const CsvTable &t, const std::string &name)
        {
            const auto it = std::find(t.header.begin(), t.header.end(), name);
            if (it == t.header.end())
                throw ConfigError("CSV lacks column '" + name + "'");
            return std::size_t(it - t.header.begin());
        }
    }

    CsvTable to_table(const std::vector<CrbRow> &rows)
    {
        CsvTable t;
        t.header = {"n", "l", "snr_db", "rmse_d", "rmse_v"};
        for (const auto &r : rows)
            t.rows.push_back({std::to_string(r.n), std::to_string(r.l), format_double(r.snr_db),
                              format_double(r.rmse_d), format_double(r.rmse_v)});
        return t;
    }

    CsvTable to_table(const std::vector<RmseRow> &rows)
    {
        CsvTable t;
        t.header = {"n", "l", "snr_db", "rmse_d", "rmse_v", "mask", "n_fft", "l_fft", "trials", "detected",
                    "rmse_d_detected", "rmse_v_detected", "crb_rmse_d", "crb_rmse_v", "range_bin", "velocity_bin"};
        for (const auto &r : rows)
            t.rows.push_back({std::to_string(r.n), std::to_string(r.l), format_double(r.snr_db),
                              format_double(r.rmse_d), format_double(r.rmse_v), r.mask, std::to_string(r.n_fft),
                              std::to_string(r.l_fft), std::to_string(r.trials), std::to_string(r.detected),
                              format_double(r.rmse_d_detected), format_double(r.rmse_v_detected),
                              format_double(r.crb_rmse_d), format_double(r.crb_rmse_v), format_double(r.range_bin),
                              format_double(r.velocity_bin)});
        return t;
    }

    CsvTable to_table(const std::vector<CurveRow> &rows)
    {
        CsvTable t;
        t.header = {"gamma", "fraction", "trials", "pd", "pd_se", "pfa", "pfa_se"};
        for (const auto &r : rows)
            t.rows.push_back({format_double(r.gamma), format_double(r.fraction), std::to_string(r.trials),
                              format_double(r.pd), format_double(r.pd_se), format_double(r.pfa),
                              format_double(r.pfa_se)});
        return t;
    }

    std::vector<CrbRow> crb_rows_from(const CsvTable &t)
    {
        const std::size_t cn = column(t, "n"), cl = column(t, "l"), cs = column(t, "snr_db"),
                          cd = column(t, "rmse_d"), cv = column(t, "rmse_v");
        std::vector<CrbRow> out;
        for (const auto &r : t.rows)
            out.push_back({to_u(r[cn]), to_u(r[cl]), to_d(r[cs]), to_d(r[cd]), to_d(r[cv])});
        return out;
    }

    std::vector<RmseRow> rmse_rows_from(const CsvTable &t)
    {
        std::vector<RmseRow> out;
        for (const auto &r : t.rows)
        {
            RmseRow x;
            x.n = to_u(r[column(t, "n")]);
            x.l = to_u(r[column(t, "l")]);
            x.snr_db = to_d(r[column(t, "snr_db")]);
            x.rmse_d = to_d(r[column(t, "rmse_d")]);
            x.rmse_v = to_d(r[column(t, "rmse_v")]);
            x.mask = r[column(t, "mask")];
            x.n_fft = to_u(r[column(t, "n_fft")]);
            x.l_fft = to_u(r[column(t, "l_fft")]);
            x.trials = to_u(r[column(t, "trials")]);
            x.detected = to_u(r[column(t, "detected")]);
            x.rmse_d_detected = to_d(r[column(t, "rmse_d_detected")]);
            x.rmse_v_detected = to_d(r[column(t, "rmse_v_detected")]);
            x.crb_rmse_d = to_d(r[column(t, "crb_rmse_d")]);
            x.crb_rmse_v = to_d(r[column(t, "crb_rmse_v")]);
            x.range_bin = to_d(r[column(t, "range_bin")]);
            x.velocity_bin = to_d(r[column(t, "velocity_bin")]);
            out.push_back(std::move(x));
        }
        return out;
    }

    std::vector<CurveRow> curve_rows_from(const CsvTable &t)
    {
        const std::size_t cg = column(t, "gamma"), cf = column(t, "fraction"), ct = column(t, "trials"),
                          cpd = column(t, "pd"), cpds = column(t, "pd_se"), cpf = column(t, "pfa"),
                          cpfs = column(t, "pfa_se");
        std::vector<CurveRow> out;
        for (const auto &r : t.rows)
            out.push_back({to_d(r[cg]), to_d(r[cf]), to_u(r[ct]), to_d(r[cpd]), to_d(r[cpds]), to_d(r[cpf]),
                           to_d(r[cpfs])});
        return out;
    }

    // ----- experiments --------------------------------------------------------

    std::vector<CrbRow> run_crb_curves(const ExperimentConfig &cfg)
    {
        return crb_curves(cfg.crb_blocks, cfg.crb_snr_db, cfg.ofdm.subcarrier_spacing, cfg.ofdm.carrier);
    }

    namespace
    {
        struct TrialError
        {
            double range = 0.0;
            double velocity = 0.0;
            bool detected = false;
        };
    }

    std::vector<RmseRow> run_rmse_experiment(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::vector<std::pair<std::size_t, std::size_t>> ffts = cfg.fft_sizes;
        if (ffts.empty())
            ffts.emplace_back(cfg.profile().n_fft, cfg.profile().l_fft);

        std::vector<SweepSetup> setups;
        for (MaskMode m : cfg.rmse_masks)
            for (const auto &[nf, lf] : ffts)
                setups.push_back(SweepSetup::make(cfg.ofdm, cfg.array, cfg.mask(m), ProfileConfig{nf, lf}, cfg.statistic,
                                                  cfg.aggregation_threshold));

        const auto limits = unambiguous_limits(cfg.ofdm);
        const std::size_t n_setups = setups.size();
        const std::size_t workers = std::min(worker_count(), cfg.trials);

        // errors[snr][setup][trial]
        std::vector<std::vector<std::vector<TrialError>>> errors(cfg.rmse_snr_db.size());
        for (std::size_t s = 0; s < cfg.rmse_snr_db.size(); ++s)
        {
            const ScenarioTemplate tmpl = cfg.scenario(cfg.rmse_snr_db[s], AmplitudeModel::ConstantModulus);
            errors[s].assign(n_setups, std::vector<TrialError>(cfg.trials));

            std::vector<std::vector<std::unique_ptr<SweepProcessor>>> procs(workers);
            std::mutex init;
            parallel_for(cfg.trials, workers, [&](std::size_t w, std::size_t i) {
                if (procs[w].empty())
                {
                    std::lock_guard lock(init);
                    for (const auto &setup : setups)
                        procs[w].push_back(std::make_unique<SweepProcessor>(setup));
                }
                Rng scene_rng = make_stream(cfg.seed, {s, i, id(Stream::Scene)});
                Rng amp_rng = make_stream(cfg.seed, {s, i, id(Stream::Amplitude)});
                const TrialScene trial = draw_trial_scene(tmpl, setups.front(), scene_rng, amp_rng);
                const Target &truth = trial.scene.targets.front();

                for (std::size_t k = 0; k < n_setups; ++k)
                {
                    Rng noise_rng = make_stream(cfg.seed, {s, i, id(Stream::Noise)});
                    const SweepOutcome out = procs[w][k]->run(trial.scene, trial.alphas, noise_rng, true);
                    TrialError &e = errors[s][k][i];
                    e.range = wrapped_error(out.estimate->range, truth.bistatic_range, limits.range);
                    e.velocity = wrapped_error(out.estimate->velocity, truth.radial_velocity, limits.velocity);
                    e.detected = detect(out.statistics, cfg.detection_threshold).target_present;
                }
            });
        }

        std::vector<RmseRow> rows;
        std::size_t k = 0;
        for (MaskMode m : cfg.rmse_masks)
            for (std::size_t f = 0; f < ffts.size(); ++f, ++k)
                for (std::size_t s = 0; s < cfg.rmse_snr_db.size(); ++s)
                {
                    RmseRow row;
                    row.mask = to_string(m);
                    row.n = cfg.ofdm.n_subcarriers;
                    row.l = cfg.ofdm.n_symbols;
                    row.snr_db = cfg.rmse_snr_db[s];
                    row.n_fft = ffts[f].first;
                    row.l_fft = ffts[f].second;
                    row.trials = cfg.trials;

                    double sd = 0, sv = 0, sd_det = 0, sv_det = 0;
                    for (const TrialError &e : errors[s][k])
                    {
                        sd += e.range * e.range;
                        sv += e.velocity * e.velocity;
                        if (e.detected)
                        {
                            ++row.detected;
                            sd_det += e.range * e.range;
                            sv_det += e.velocity * e.velocity;
                        }
                    }
                    row.rmse_d = std::sqrt(sd / double(cfg.trials));
                    row.rmse_v = std::sqrt(sv / double(cfg.trials));
                    if (row.detected)
                    {
                        row.rmse_d_detected = std::sqrt(sd_det / double(row.detected));
                        row.rmse_v_detected = std::sqrt(sv_det / double(row.detected));
                    }

                    const CrbResult bound = crb_closed_form({cfg.ofdm.n_subcarriers, cfg.ofdm.n_symbols,
                                                             cfg.ofdm.subcarrier_spacing, cfg.ofdm.carrier,
                                                             db2lin(row.snr_db)});
                    row.crb_rmse_d = std::sqrt(bound.var_d);
                    row.crb_rmse_v = std::sqrt(bound.var_v);
                    row.range_bin = limits.range / double(row.n_fft);
                    row.velocity_bin = limits.velocity / double(row.l_fft);
                    rows.push_back(std::move(row));
                }

        // Mask, then SNR, then transform size.
        std::stable_sort(rows.begin(), rows.end(), [&](const RmseRow &a, const RmseRow &b) {
            auto rank = [&](const std::string &mask) {
                for (std::size_t i = 0; i < cfg.rmse_masks.size(); ++i)
                    if (to_string(cfg.rmse_masks[i]) == mask)
                        return i;
                return cfg.rmse_masks.size();
            };
            if (rank(a.mask) != rank(b.mask))
                return rank(a.mask) < rank(b.mask);
            auto snr_rank = [&](double v) {
                return std::size_t(std::find(cfg.rmse_snr_db.begin(), cfg.rmse_snr_db.end(), v) - cfg.rmse_snr_db.begin());
            };
            return snr_rank(a.snr_db) < snr_rank(b.snr_db);
        });
        return rows;
    }

    DetectionRun run_detection_sweep(const ExperimentConfig &cfg)
    {
        cfg.validate();
        DetectionScenario scenario{SweepSetup::make(cfg.ofdm, cfg.array, cfg.mask(MaskMode::Ssb), cfg.profile(),
                                                    cfg.statistic, cfg.aggregation_threshold),
                                   cfg.scenario(cfg.detect_snr_db, AmplitudeModel::Swerling1)};

        DetectionRun run;
        run.snr_db = cfg.detect_snr_db;
        if (cfg.calibrate_pd)
        {
            run.snr_db = calibrate_snr_for_pd(scenario, cfg.detection_threshold, *cfg.calibrate_pd, cfg.trials,
                                              cfg.seed, -30.0, 10.0);
            scenario.scene.snr_db = run.snr_db;
        }
        run.rows = deactivation_sweep(scenario, cfg.gammas, cfg.fractions, cfg.trials, cfg.seed);
        return run;
    }

    json output_metadata(const ExperimentConfig &cfg)
    {
        return {{"config_hash", config_hash(cfg)},
                {"experiment", cfg.experiment},
                {"seed", cfg.seed},
                {"version", kVersion}};
    }

    void write_text_file(const std::filesystem::path &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open output file " + path.string());
        out << text;
        if (!out)
            throw std::runtime_error("failed writing output file " + path.string());
    }
}
