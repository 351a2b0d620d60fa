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

#include "ssbsense/waveform.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ssbsense
{
    void OfdmFrameConfig::validate() const
    {
        if (n_subcarriers < 1 || n_symbols < 1)
            throw ConfigError("OFDM block needs at least one subcarrier and one symbol");
        if (!(subcarrier_spacing > 0.0))
            throw ConfigError("subcarrier spacing must be positive");
        if (!(carrier > 0.0))
            throw ConfigError("carrier frequency must be positive");
        if (!(cyclic_prefix >= 0.0))
            throw ConfigError("cyclic prefix must be non-negative");
        if (!(tx_power >= 0.0))
            throw ConfigError("transmit power must be non-negative");
    }

    SsbMask::SsbMask(std::size_t n_subcarriers, std::size_t n_symbols, bool active)
        : bits_(n_subcarriers, n_symbols, active ? 1 : 0) {}

    std::size_t SsbMask::count_active() const
    {
        const auto f = bits_.flat();
        return std::size_t(std::count_if(f.begin(), f.end(), [](std::uint8_t b) { return b != 0; }));
    }

    void SsbMask::apply(CMatrix &grid) const
    {
        if (grid.rows() != n_subcarriers() || grid.cols() != n_symbols())
            throw ConfigError("mask and grid dimensions differ");
        auto g = grid.flat();
        const auto b = bits_.flat();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (b[i] == 0)
                g[i] = 0.0;
    }

    SsbMask default_ssb_mask(const OfdmFrameConfig &cfg)
    {
        if (cfg.n_subcarriers != 240 || cfg.n_symbols != 4)
            throw ConfigError("default SSB layout is defined for 240 subcarriers x 4 symbols, got " +
                              std::to_string(cfg.n_subcarriers) + " x " + std::to_string(cfg.n_symbols));

        SsbMask mask(240, 4, false);
        auto fill = [&mask](std::size_t l, std::size_t first, std::size_t last) {
            for (std::size_t n = first; n <= last; ++n)
                mask.set(n, l, true);
        };
        fill(0, 56, 182); // PSS
        fill(1, 0, 239);  // PBCH
        fill(2, 0, 47);   // PBCH
        fill(2, 56, 182); // SSS
        fill(2, 192, 239); // PBCH
        fill(3, 0, 239);  // PBCH
        return mask;
    }

    SsbMask parse_mask(std::string_view text, std::size_t n_subcarriers, std::size_t n_symbols)
    {
        SsbMask mask(n_subcarriers, n_symbols, false);
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t l = 0;
        while (std::getline(in, line))
        {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            if (l >= n_symbols)
                throw ConfigError("mask has more than " + std::to_string(n_symbols) + " symbol lines");
            if (line.size() != n_subcarriers)
                throw ConfigError("mask line " + std::to_string(l + 1) + " has " + std::to_string(line.size()) +
                                  " characters, expected " + std::to_string(n_subcarriers));
            for (std::size_t n = 0; n < n_subcarriers; ++n)
            {
                if (line[n] != '0' && line[n] != '1')
                    throw ConfigError("mask line " + std::to_string(l + 1) + " contains '" + line[n] + "'");
                mask.set(n, l, line[n] == '1');
            }
            ++l;
        }
        if (l != n_symbols)
            throw ConfigError("mask has " + std::to_string(l) + " symbol lines, expected " + std::to_string(n_symbols));
        return mask;
    }

    SsbMask load_mask_file(const std::filesystem::path &path, std::size_t n_subcarriers, std::size_t n_symbols)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open mask file " + path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_mask(buf.str(), n_subcarriers, n_symbols);
    }

    std::string format_mask(const SsbMask &mask)
    {
        std::string out;
        out.reserve((mask.n_subcarriers() + 1) * mask.n_symbols());
        for (std::size_t l = 0; l < mask.n_symbols(); ++l)
        {
            for (std::size_t n = 0; n < mask.n_subcarriers(); ++n)
                out.push_back(mask.active(n, l) ? '1' : '0');
            out.push_back('\n');
        }
        return out;
    }

    void SweepTiming::validate() const
    {
        if (!(burst_set_period > 0.0) || !(burst_set_period <= ssb_periodicity))
            throw ConfigError("sweep timing needs 0 < burst set period <= SSB periodicity");
    }

    double sensing_overhead_percent(const SweepTiming &timing, std::size_t num_beams, double total_symbol_duration)
    {
        if (!(timing.ssb_periodicity > 0.0))
            throw ConfigError("SSB periodicity must be positive");
        return 4.0 * 100.0 * double(num_beams) * total_symbol_duration / timing.ssb_periodicity;
    }
}
