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

#ifndef SSBSENSE_WAVEFORM_HPP
#define SSBSENSE_WAVEFORM_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ssbsense/types.hpp"

namespace ssbsense
{
    /**
     * @brief OFDM block numerology.
     *
     * The symbol duration is always 1 / subcarrier_spacing; it is derived, never stored.
     * Defaults: 240 subcarriers x 4 symbols at 60 kHz spacing on a 15 GHz carrier,
     * cyclic prefix 7% of the symbol.
     */
    struct OfdmFrameConfig
    {
        std::size_t n_subcarriers = 240;
        std::size_t n_symbols = 4;
        double subcarrier_spacing = 60e3; // Hz
        double carrier = 15e9;            // Hz
        double cyclic_prefix = 0.07 / 60e3; // s
        double tx_power = 1.0;            // W per symbol

        double symbol_duration() const { return 1.0 / subcarrier_spacing; }
        double total_symbol_duration() const { return symbol_duration() + cyclic_prefix; }
        double wavelength() const { return kSpeedOfLight / carrier; }

        void validate() const;
    };

    /// Resource-element occupancy, N x L; nonzero = the element carries a transmitted symbol.
    class SsbMask
    {
    public:
        SsbMask() = default;
        SsbMask(std::size_t n_subcarriers, std::size_t n_symbols, bool active);

        static SsbMask full(const OfdmFrameConfig &cfg) { return {cfg.n_subcarriers, cfg.n_symbols, true}; }

        std::size_t n_subcarriers() const { return bits_.rows(); }
        std::size_t n_symbols() const { return bits_.cols(); }

        bool active(std::size_t n, std::size_t l) const { return bits_(n, l) != 0; }
        void set(std::size_t n, std::size_t l, bool on) { bits_(n, l) = on ? 1 : 0; }

        std::size_t count_active() const;
        bool all_active() const { return count_active() == bits_.size(); }

        /// Zero every inactive element of an N x L grid. Idempotent.
        void apply(CMatrix &grid) const;

        bool operator==(const SsbMask &) const = default;

    private:
        Matrix<std::uint8_t> bits_;
    };

    /**
     * @brief Standard NR SS/PBCH block layout on a 240 x 4 grid.
     *
     * Symbol 0 carries PSS on subcarriers 56..182; symbols 1 and 3 are full PBCH;
     * symbol 2 carries PBCH on 0..47 and 192..239 plus SSS on 56..182.
     */
    SsbMask default_ssb_mask(const OfdmFrameConfig &cfg);

    /// Mask file format: L lines of N characters, '1' active and '0' inactive.
    SsbMask parse_mask(std::string_view text, std::size_t n_subcarriers, std::size_t n_symbols);
    SsbMask load_mask_file(const std::filesystem::path &path, std::size_t n_subcarriers, std::size_t n_symbols);
    std::string format_mask(const SsbMask &mask);

    struct SweepTiming
    {
        double burst_set_period = 5e-3; // s
        double ssb_periodicity = 20e-3; // s

        void validate() const;
    };

    /// Share of the SSB periodicity spent in sensing reception, in percent: 400 * R * T / T_SP.
    double sensing_overhead_percent(const SweepTiming &timing, std::size_t num_beams, double total_symbol_duration);
}

#endif
