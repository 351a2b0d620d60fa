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

#include "ssbsense/array.hpp"

#include <cmath>
#include <string>

namespace ssbsense
{
    namespace
    {
        void check_angle(double angle, const char *name)
        {
            if (!std::isfinite(angle) || std::abs(angle) >= kPi / 2.0)
                throw DomainError(std::string(name) + " must lie in (-pi/2, pi/2), got " + std::to_string(angle));
        }

        // sum_{k<n} exp(-j*pi*k*u)
        cplx ula_sum(unsigned n, double u)
        {
            cplx acc{0.0, 0.0};
            for (unsigned k = 0; k < n; ++k)
                acc += std::polar(1.0, -kPi * double(k) * u);
            return acc;
        }
    }

    void ArrayConfig::validate() const
    {
        if (m_h < 1 || m_v < 1)
            throw ConfigError("array needs at least one element per row and column");
    }

    std::vector<cplx> steering_vector(const ArrayConfig &cfg, double azimuth, double elevation)
    {
        cfg.validate();
        check_angle(azimuth, "azimuth");
        check_angle(elevation, "elevation");

        const double u_v = std::sin(elevation);
        const double u_h = std::sin(azimuth) * std::cos(elevation);

        std::vector<cplx> a(cfg.num_elements());
        for (unsigned p = 0; p < cfg.m_v; ++p)
            for (unsigned m = 0; m < cfg.m_h; ++m)
                a[std::size_t(p) * cfg.m_h + m] = std::polar(1.0, -kPi * (double(p) * u_v + double(m) * u_h));
        return a;
    }

    int max_grid_index(const ArrayConfig &cfg)
    {
        const double root = std::sqrt(double(cfg.num_elements()));
        const int q = int(std::floor(root / 2.0 - 1.0));
        return q < 0 ? 0 : q;
    }

    BeamGrid beam_grid(const ArrayConfig &cfg, bool surveillance_only)
    {
        cfg.validate();
        if (!cfg.is_square())
            throw ConfigError("grid of beams needs a square array, got " + std::to_string(cfg.m_v) + "x" +
                              std::to_string(cfg.m_h));

        const int q_max = max_grid_index(cfg);
        const double root = double(cfg.m_h);
        auto angle = [root](int q) { return std::asin(2.0 * double(q) / root); };

        BeamGrid grid;
        for (int q_el = surveillance_only ? 0 : -q_max; q_el <= q_max; ++q_el)
            for (int q_az = -q_max; q_az <= q_max; ++q_az)
                grid.beams.push_back({angle(q_az), angle(q_el), q_az, q_el});
        return grid;
    }

    CMatrix precoder(const BeamGrid &grid, const ArrayConfig &cfg)
    {
        const std::size_t m = cfg.num_elements();
        const double scale = 1.0 / std::sqrt(double(m));
        CMatrix f(m, grid.size());
        for (std::size_t r = 0; r < grid.size(); ++r)
        {
            const auto a = steering_vector(cfg, grid.beams[r].azimuth, grid.beams[r].elevation);
            for (std::size_t i = 0; i < m; ++i)
                f(i, r) = std::conj(a[i]) * scale;
        }
        return f;
    }

    cplx beam_gain(const ArrayConfig &cfg, double target_az, double target_el, double beam_az, double beam_el)
    {
        cfg.validate();
        check_angle(target_az, "target azimuth");
        check_angle(target_el, "target elevation");
        check_angle(beam_az, "beam azimuth");
        check_angle(beam_el, "beam elevation");

        // The Kronecker structure factorizes the inner product into two ULA sums.
        const double du_v = std::sin(target_el) - std::sin(beam_el);
        const double du_h = std::sin(target_az) * std::cos(target_el) - std::sin(beam_az) * std::cos(beam_el);
        return ula_sum(cfg.m_v, du_v) * ula_sum(cfg.m_h, du_h);
    }

    std::size_t best_beam(const ArrayConfig &cfg, const BeamGrid &grid, double az, double el)
    {
        if (grid.size() == 0)
            throw ConfigError("empty beam grid");
        std::size_t best = 0;
        double best_mag = -1.0;
        for (std::size_t r = 0; r < grid.size(); ++r)
        {
            const double mag = std::abs(beam_gain(cfg, az, el, grid.beams[r].azimuth, grid.beams[r].elevation));
            if (mag > best_mag)
            {
                best_mag = mag;
                best = r;
            }
        }
        return best;
    }
}
