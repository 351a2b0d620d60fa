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

#ifndef SSBSENSE_HARNESS_HPP
#define SSBSENSE_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ssbsense/crb.hpp"
#include "ssbsense/detector.hpp"

namespace ssbsense
{
    inline constexpr const char *kVersion = "0.1.0";
    inline constexpr std::uint64_t kDefaultSeed = 12345;

    enum class MaskMode
    {
        Full,
        Ssb
    };

    std::string to_string(MaskMode m);
    MaskMode parse_mask_mode(const std::string &s);

    /**
     * @brief Resolved experiment configuration. Every field has a default; see
     * docs/config.md for the JSON layout.
     */
    struct ExperimentConfig
    {
        std::string experiment = "rmse"; // crb | rmse | detect
        std::uint64_t seed = kDefaultSeed;
        std::size_t trials = 500;

        OfdmFrameConfig ofdm;
        ArrayConfig array;
        std::size_t n_fft_factor = 4;
        std::size_t l_fft_factor = 16;
        PafStatistic statistic = PafStatistic::PeakOverRms;
        double aggregation_threshold = 6.0;
        double detection_threshold = 4.0;

        // scene
        double noise_power_dbm = -94.0;
        double rcs_dbsm = -10.0;
        std::optional<AmplitudeModel> amplitude; // per-experiment default when unset
        TargetSector sector;
        bool noiseless = false;
        std::optional<FixedTarget> fixed_target;
        std::optional<std::filesystem::path> mask_file;

        // crb
        std::vector<std::pair<std::size_t, std::size_t>> crb_blocks{{240, 4}, {480, 4}, {240, 8}};
        std::vector<double> crb_snr_db{-20, -15, -10, -5, 0, 5, 10};

        // rmse
        std::vector<double> rmse_snr_db{-10.0, -7.0};
        std::vector<MaskMode> rmse_masks{MaskMode::Full, MaskMode::Ssb};
        std::vector<std::pair<std::size_t, std::size_t>> fft_sizes; // empty: use the padding factors

        // detect
        double detect_snr_db = -10.0;
        std::vector<double> gammas{4.0};
        std::vector<double> fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
        std::optional<double> calibrate_pd;

        ProfileConfig profile() const { return ProfileConfig::padded(ofdm, n_fft_factor, l_fft_factor); }
        double noise_power_w() const { return db2lin(noise_power_dbm) * 1e-3; }
        SsbMask mask(MaskMode mode) const;
        ScenarioTemplate scenario(double snr_db, AmplitudeModel fallback) const;

        void validate() const;
    };

    ExperimentConfig config_from_json(const nlohmann::json &j);
    nlohmann::json config_to_json(const ExperimentConfig &cfg);
    ExperimentConfig load_config(const std::filesystem::path &path);

    /// FNV-1a of the canonical JSON of the resolved config, as 16 hex digits.
    std::string config_hash(const ExperimentConfig &cfg);

    // ----- CSV tables ---------------------------------------------------------

    /// A CSV table preceded by one '#'-prefixed JSON metadata line.
    struct CsvTable
    {
        nlohmann::json metadata = nlohmann::json::object();
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;
    };

    std::string emit_csv(const CsvTable &table);
    CsvTable parse_csv(const std::string &text);

    /// Shortest text that parses back to exactly the same double.
    std::string format_double(double x);

    struct RmseRow
    {
        std::string mask = "full";
        std::size_t n = 0;
        std::size_t l = 0;
        double snr_db = 0.0;
        std::size_t n_fft = 0;
        std::size_t l_fft = 0;
        std::size_t trials = 0;
        double rmse_d = 0.0; // all trials
        double rmse_v = 0.0;
        std::size_t detected = 0;
        double rmse_d_detected = 0.0; // trials whose max statistic exceeded the detection threshold
        double rmse_v_detected = 0.0;
        double crb_rmse_d = 0.0;
        double crb_rmse_v = 0.0;
        double range_bin = 0.0;
        double velocity_bin = 0.0;

        bool operator==(const RmseRow &) const = default;
    };

    CsvTable to_table(const std::vector<CrbRow> &rows);
    CsvTable to_table(const std::vector<RmseRow> &rows);
    CsvTable to_table(const std::vector<CurveRow> &rows);
    std::vector<CrbRow> crb_rows_from(const CsvTable &t);
    std::vector<RmseRow> rmse_rows_from(const CsvTable &t);
    std::vector<CurveRow> curve_rows_from(const CsvTable &t);

    // ----- experiments ---------------------------------------------------------

    std::vector<CrbRow> run_crb_curves(const ExperimentConfig &cfg);

    /**
     * @brief Estimator RMSE next to the closed-form bound.
     *
     * For every SNR point, trial i draws one target (shared by all mask modes
     * and transform sizes), synthesizes the sweep, aggregates the beams and
     * takes the peak. Errors are wrapped modulo the unambiguous range and
     * velocity spans. Rows are ordered by mask, SNR, then transform size.
     */
    std::vector<RmseRow> run_rmse_experiment(const ExperimentConfig &cfg);

    struct DetectionRun
    {
        double snr_db = 0.0; // operating point actually used (after calibration, if requested)
        std::vector<CurveRow> rows;
    };

    DetectionRun run_detection_sweep(const ExperimentConfig &cfg);

    /// Metadata object written on the first line of each output.
    nlohmann::json output_metadata(const ExperimentConfig &cfg);

    /// Writes the table; throws std::runtime_error naming the path on failure.
    void write_text_file(const std::filesystem::path &path, const std::string &text);
}

#endif
