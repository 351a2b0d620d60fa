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

#include "ssbsense/crb.hpp"

#include <cmath>
#include <string>

namespace ssbsense
{
    double CrbInputs::determinant_factor() const
    {
        const double n = double(n_subcarriers), l = double(n_symbols);
        return 7.0 * n * l - n - l - 5.0;
    }

    void CrbInputs::validate() const
    {
        if (n_subcarriers < 1 || n_symbols < 1)
            throw DomainError("bound needs N >= 1 and L >= 1");
        if (!(subcarrier_spacing > 0.0) || !(carrier > 0.0))
            throw DomainError("subcarrier spacing and carrier must be positive");
        if (!(snr_r >= 0.0))
            throw DomainError("SNR must be non-negative");
    }

    Mat2 fim(const CrbInputs &in)
    {
        in.validate();
        const double n = double(in.n_subcarriers), l = double(in.n_symbols);
        const double ts = in.symbol_duration(), lambda = in.wavelength(), fd = in.subcarrier_spacing;
        const double c = kSpeedOfLight;
        const double pi2 = kPi * kPi;
        const double s = in.snr_r;

        Mat2 f{};
        f[0][0] = (4.0 / 3.0) * pi2 * s * (fd * fd) / (c * c) * n * l * (n + 1.0) * (2.0 * n + 1.0);
        f[1][1] = (16.0 / 3.0) * pi2 * s * (ts * ts) / (lambda * lambda) * n * l * (l + 1.0) * (2.0 * l + 1.0);
        f[0][1] = -4.0 * pi2 * s / (c * lambda) * n * l * (l + 1.0) * (n + 1.0);
        f[1][0] = f[0][1];
        return f;
    }

    CrbResult crb_closed_form(const CrbInputs &in)
    {
        in.validate();
        const double det = in.determinant_factor();
        if (!(det > 0.0))
            throw DomainError("7NL - N - L - 5 must be positive, got " + std::to_string(det));
        if (!(in.snr_r > 0.0))
            throw DomainError("bound needs a positive SNR");

        const double n = double(in.n_subcarriers), l = double(in.n_symbols);
        const double ts = in.symbol_duration(), lambda = in.wavelength(), fd = in.subcarrier_spacing;
        const double c = kSpeedOfLight;
        const double scale = 3.0 / (kPi * kPi * in.snr_r * n * l * det);

        CrbResult out;
        out.fim = fim(in);
        out.crb[0][0] = scale * ts * ts * c * c * (2.0 * l + 1.0) / (n + 1.0);
        out.crb[1][1] = scale * 0.25 * lambda * lambda * fd * fd * (2.0 * n + 1.0) / (l + 1.0);
        out.crb[0][1] = scale * 0.75 * lambda * c;
        out.crb[1][0] = out.crb[0][1];
        out.var_d = out.crb[0][0];
        out.var_v = out.crb[1][1];
        return out;
    }

    std::vector<CrbRow> crb_curves(std::span<const std::pair<std::size_t, std::size_t>> blocks,
                                   std::span<const double> snr_db, double subcarrier_spacing, double carrier)
    {
        std::vector<CrbRow> rows;
        rows.reserve(blocks.size() * snr_db.size());
        for (const auto &[n, l] : blocks)
            for (double db : snr_db)
            {
                const CrbInputs in{n, l, subcarrier_spacing, carrier, db2lin(db)};
                const CrbResult r = crb_closed_form(in);
                rows.push_back({n, l, db, std::sqrt(r.var_d), std::sqrt(r.var_v)});
            }
        return rows;
    }

    double receive_snr(double tx_power, double beta, double gain_abs, double noise_power, std::size_t num_elements)
    {
        if (!(noise_power > 0.0) || num_elements == 0)
            throw DomainError("SNR needs positive noise power and at least one element");
        return tx_power * beta * gain_abs * gain_abs / (noise_power * double(num_elements));
    }

    double tx_power_for_snr(double snr_r, double beta, double gain_abs, double noise_power, std::size_t num_elements)
    {
        if (!(beta > 0.0) || !(gain_abs > 0.0))
            throw DomainError("cannot reach a target SNR with zero path or beam gain");
        return snr_r * noise_power * double(num_elements) / (beta * gain_abs * gain_abs);
    }
}
