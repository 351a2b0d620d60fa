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

#ifndef SSBSENSE_SWEEP_HPP
#define SSBSENSE_SWEEP_HPP

#include <optional>
#include <span>
#include <vector>

#include "ssbsense/channel.hpp"
#include "ssbsense/estimator.hpp"

namespace ssbsense
{
    /// Everything fixed across the trials of one experiment point.
    struct SweepSetup
    {
        OfdmFrameConfig ofdm;
        ArrayConfig array;
        BeamGrid grid;
        CMatrix precoder;
        SsbMask mask;
        ProfileConfig profile;
        PafStatistic statistic = PafStatistic::PeakOverRms;
        double aggregation_threshold = 6.0;

        /// Surveillance grid and precoder derived from the array.
        static SweepSetup make(const OfdmFrameConfig &ofdm, const ArrayConfig &array, const SsbMask &mask,
                               const ProfileConfig &profile, PafStatistic statistic, double aggregation_threshold);
    };

    struct SweepOutcome
    {
        std::vector<double> statistics; // one per beam
        std::optional<RangeVelocityEstimate> estimate;
        std::vector<std::size_t> selected;
    };

    /// Synthesis, per-beam profiles, statistics and (optionally) aggregation plus peak estimate.
    class SweepProcessor
    {
    public:
        explicit SweepProcessor(const SweepSetup &setup);

        SweepOutcome run(const Scene &scene, std::span<const cplx> alphas, Rng &noise_rng, bool estimate);

        const SweepSetup &setup() const { return *setup_; }

    private:
        const SweepSetup *setup_;
        ProfileProcessor processor_;
        std::vector<RangeVelocityProfile> profiles_;
    };

    /// Angular sector that random targets are drawn from.
    struct TargetSector
    {
        double max_azimuth = 0.9272952180016122;   // rad, arcsin(0.8) = 53.13 deg
        double min_elevation = 0.0;                // rad
        double max_elevation = 0.9272952180016122; // rad
    };

    /// Fixed target used instead of random draws (m, m/s, rad).
    struct FixedTarget
    {
        double range = 0.0;
        double velocity = 0.0;
        double azimuth = 0.0;
        double elevation = 0.0;
    };

    /**
     * @brief Random single-target trial parameters.
     *
     * Range is uniform in (0, c T_s], velocity uniform over the unambiguous
     * interval [-v_u/2, v_u/2), angles uniform over the sector. The transmit
     * power is set so that the beam closest to the target sees SNR_r = snr_db.
     */
    struct ScenarioTemplate
    {
        double snr_db = -10.0;
        double noise_power = 3.981071705534972e-13; // W
        double rcs = 0.1;                           // m^2
        AmplitudeModel amplitude = AmplitudeModel::Swerling1;
        TargetSector sector;
        bool noiseless = false; // synthesize without noise; noise_power still sets the transmit power
        std::optional<FixedTarget> fixed_target;
    };

    struct TrialScene
    {
        Scene scene;
        std::vector<cplx> alphas;
        std::size_t best_beam = 0;
        double best_gain = 0.0; // |g| toward the target
    };

    TrialScene draw_trial_scene(const ScenarioTemplate &tmpl, const SweepSetup &setup, Rng &scene_rng, Rng &amp_rng);

    /// Same target geometry without the echo: K = 0, same noise power.
    Scene noise_only_scene(const ScenarioTemplate &tmpl, const SweepSetup &setup);

    /// Signed error wrapped into [-period/2, period/2).
    double wrapped_error(double estimate, double truth, double period);
}

#endif
