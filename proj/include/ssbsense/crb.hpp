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

#ifndef SSBSENSE_CRB_HPP
#define SSBSENSE_CRB_HPP

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ssbsense/types.hpp"

namespace ssbsense
{
    /// 2x2 matrix indexed [row][col]; index 0 is bistatic range, 1 is velocity.
    using Mat2 = std::array<std::array<double, 2>, 2>;

    /**
     * @brief Single-target range/velocity bound parameters.
     *
     * snr_r is the linear receive SNR rho beta g^2 / (sigma_n^2 M).
     */
    struct CrbInputs
    {
        std::size_t n_subcarriers = 240;
        std::size_t n_symbols = 4;
        double subcarrier_spacing = 60e3; // Hz
        double carrier = 15e9;            // Hz
        double snr_r = 1.0;

        double symbol_duration() const { return 1.0 / subcarrier_spacing; }
        double wavelength() const { return kSpeedOfLight / carrier; }

        /// 7NL - N - L - 5; the bound exists only when positive.
        double determinant_factor() const;
        void validate() const;
    };

    struct CrbResult
    {
        Mat2 fim{};
        Mat2 crb{};
        double var_d = 0.0; // m^2
        double var_v = 0.0; // (m/s)^2
    };

    /// Closed-form Fisher information for (d, v).
    Mat2 fim(const CrbInputs &in);

    /// Closed-form inverse of fim(); throws DomainError when 7NL - N - L - 5 <= 0 or snr_r <= 0.
    CrbResult crb_closed_form(const CrbInputs &in);

    struct CrbRow
    {
        std::size_t n = 0;
        std::size_t l = 0;
        double snr_db = 0.0;
        double rmse_d = 0.0; // m
        double rmse_v = 0.0; // m/s
    };

    /// Bound curves over every (N, L) pair and SNR point, rows ordered by pair then SNR.
    std::vector<CrbRow> crb_curves(std::span<const std::pair<std::size_t, std::size_t>> blocks,
                                   std::span<const double> snr_db, double subcarrier_spacing, double carrier);

    /// SNR_r = rho beta |g|^2 / (sigma_n^2 M).
    double receive_snr(double tx_power, double beta, double gain_abs, double noise_power, std::size_t num_elements);

    /// Transmit power per symbol that yields the requested SNR_r.
    double tx_power_for_snr(double snr_r, double beta, double gain_abs, double noise_power, std::size_t num_elements);
}

#endif
