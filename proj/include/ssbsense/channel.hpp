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

#ifndef SSBSENSE_CHANNEL_HPP
#define SSBSENSE_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssbsense/array.hpp"
#include "ssbsense/random.hpp"
#include "ssbsense/waveform.hpp"

namespace ssbsense
{
    /// Point scatterer seen by the bistatic pair.
    struct Target
    {
        double bistatic_range = 0.0;  // m
        double radial_velocity = 0.0; // m/s
        double arrival_az = 0.0;      // rad, at the sensing receiver
        double arrival_el = 0.0;
        double departure_az = 0.0;    // rad, at the transmitter
        double departure_el = 0.0;
        double rcs = 0.1;             // m^2
        double d_tx = 150.0;          // m, transmitter to target
        double d_rx = 150.0;          // m, target to receiver

        void validate() const;
    };

    /// Line-of-sight transmitter-to-receiver path. Only used when leakage is non-zero.
    struct DirectLink
    {
        double baseline = 500.0; // m
        double departure_az = 0.0;
        double departure_el = 0.0;
        double arrival_az = 0.0;
        double arrival_el = 0.0;
    };

    struct Scene
    {
        std::vector<Target> targets;
        double noise_power = 3.981071705534972e-13; // W, -94 dBm; 0 means noiseless
        OfdmFrameConfig ofdm;
        ArrayConfig array;
        std::uint64_t rng_seed = 0;

        /// Residual direct-link amplitude after cancellation (0 = perfect cancellation).
        double direct_leakage = 0.0;
        DirectLink direct_link;

        void validate() const;
    };

    /// Per-beam received frame. `samples` is the first-antenna N x L grid; `tensor`,
    /// when requested, holds all M antennas laid out as [m][n][l].
    struct RxBeamFrame
    {
        std::size_t beam = 0;
        CMatrix samples;
        std::vector<cplx> tensor;

        cplx antenna_sample(std::size_t m, std::size_t n, std::size_t l) const
        {
            return tensor[(m * samples.rows() + n) * samples.cols() + l];
        }
    };

    struct SynthesisOptions
    {
        bool full_tensor = false;
    };

    enum class AmplitudeModel
    {
        Swerling1,      // alpha ~ CN(0, 1), fixed for the sweep
        ConstantModulus // |alpha| = 1 with uniform phase
    };

    /// Bistatic large-scale gain lambda^2 sigma / ((4 pi)^3 d_tx^2 d_rx^2).
    double path_gain_beta(const Target &target, double wavelength);

    /// K independent CN(0, 1) amplitudes.
    std::vector<cplx> draw_swerling1(Rng &rng, std::size_t k);

    std::vector<cplx> draw_amplitudes(Rng &rng, std::size_t k, AmplitudeModel model);

    /**
     * @brief Echo frames for every beam of the sweep after symbol removal and
     * direct-link cancellation.
     *
     * Sample (n, l) of beam r at antenna m is
     *   sqrt(rho) sum_k alpha_k sqrt(beta_k) a_m(arrival_k) [a(departure_k)^T f_r]
     *       exp(-j 2 pi n f_delta d_k / c) exp(+j 4 pi v_k l T_s / lambda) + w
     * with w ~ CN(0, noise_power). Resource elements switched off by the mask
     * carry noise only. Noise for beam r comes from a substream seeded by one
     * draw of `noise_rng` and the beam index, so antenna-0 noise does not depend
     * on whether the full tensor is produced.
     */
    std::vector<RxBeamFrame> synthesize_rx_frames(const Scene &scene, const BeamGrid &grid, const CMatrix &precoder,
                                                  const SsbMask &mask, std::span<const cplx> alphas, Rng &noise_rng,
                                                  const SynthesisOptions &options = {});

    /// Convenience overload: draws Swerling-1 amplitudes from `rng`, then noise.
    std::vector<RxBeamFrame> synthesize_rx_frames(const Scene &scene, const BeamGrid &grid, const CMatrix &precoder,
                                                  const SsbMask &mask, Rng &rng,
                                                  const SynthesisOptions &options = {});

    struct UnambiguousLimits
    {
        double range;    // m, c * T_s
        double velocity; // m/s, lambda * f_delta / 2
    };

    UnambiguousLimits unambiguous_limits(const OfdmFrameConfig &cfg);
}

#endif
