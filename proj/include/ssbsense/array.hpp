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

#ifndef SSBSENSE_ARRAY_HPP
#define SSBSENSE_ARRAY_HPP

#include <vector>

#include "ssbsense/types.hpp"

namespace ssbsense
{
    /**
     * @brief Uniform planar array with half-wavelength element spacing.
     *
     * Elements are indexed vertical-major: element (p, m) for row p in [0, m_v)
     * and column m in [0, m_h) sits at index p * m_h + m.
     */
    struct ArrayConfig
    {
        unsigned m_h = 10; // antennas per row
        unsigned m_v = 10; // antennas per column

        std::size_t num_elements() const { return std::size_t(m_h) * m_v; }
        bool is_square() const { return m_h == m_v; }
        void validate() const;
    };

    /// One sweep direction of the grid of beams, with its integer grid indices.
    struct BeamAngle
    {
        double azimuth = 0.0;   // rad
        double elevation = 0.0; // rad
        int q_az = 0;
        int q_el = 0;
    };

    struct BeamGrid
    {
        std::vector<BeamAngle> beams; // row-major over (q_el, q_az), both ascending

        std::size_t size() const { return beams.size(); }
    };

    /// UPA response a(az, el) = a_V(el, 0) kron a_H(az, el). Throws DomainError for |angle| >= pi/2.
    std::vector<cplx> steering_vector(const ArrayConfig &cfg, double azimuth, double elevation);

    /// Largest grid index: floor(sqrt(M)/2 - 1), clamped at zero.
    int max_grid_index(const ArrayConfig &cfg);

    /**
     * @brief Grid-of-beams angle set, angle = arcsin(2q / sqrt(M)) on both axes.
     *
     * With surveillance_only, only beams with elevation >= 0 are kept. For a
     * 10x10 array this is 81 beams, 45 in surveillance mode. Non-square arrays
     * throw ConfigError.
     */
    BeamGrid beam_grid(const ArrayConfig &cfg, bool surveillance_only);

    /// Normalized precoder, M x R. Column r is conj(a(beam r)) / sqrt(M).
    CMatrix precoder(const BeamGrid &grid, const ArrayConfig &cfg);

    /// g = a(target)^T conj(a(beam)); |g| <= M with equality when the directions coincide.
    cplx beam_gain(const ArrayConfig &cfg, double target_az, double target_el,
                   double beam_az, double beam_el);

    /// Index of the beam with the largest |g| toward the given direction.
    std::size_t best_beam(const ArrayConfig &cfg, const BeamGrid &grid, double az, double el);
}

#endif
