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

#include "ssbsense/sweep.hpp"

#include <cmath>

#include "ssbsense/crb.hpp"

namespace ssbsense
{
    SweepSetup SweepSetup::make(const OfdmFrameConfig &ofdm, const ArrayConfig &array, const SsbMask &mask,
                                const ProfileConfig &profile, PafStatistic statistic, double aggregation_threshold)
    {
        ofdm.validate();
        profile.validate_for(ofdm);
        if (mask.n_subcarriers() != ofdm.n_subcarriers || mask.n_symbols() != ofdm.n_symbols)
            throw ConfigError("mask dimensions do not match the OFDM block");

        SweepSetup s;
        s.ofdm = ofdm;
        s.array = array;
        s.grid = beam_grid(array, true);
        s.precoder = ssbsense::precoder(s.grid, array);
        s.mask = mask;
        s.profile = profile;
        s.statistic = statistic;
        s.aggregation_threshold = aggregation_threshold;
        return s;
    }

    SweepProcessor::SweepProcessor(const SweepSetup &setup)
        : setup_(&setup), processor_(setup.ofdm, setup.profile), profiles_(setup.grid.size()) {}

    SweepOutcome SweepProcessor::run(const Scene &scene, std::span<const cplx> alphas, Rng &noise_rng, bool estimate)
    {
        const SweepSetup &s = *setup_;
        const auto frames = synthesize_rx_frames(scene, s.grid, s.precoder, s.mask, alphas, noise_rng);

        SweepOutcome out;
        out.statistics.resize(frames.size());
        for (std::size_t r = 0; r < frames.size(); ++r)
        {
            processor_.compute_into(frames[r].samples, profiles_[r]);
            out.statistics[r] = paf_statistic(profiles_[r], s.statistic);
        }

        if (estimate)
        {
            const Aggregate agg = aggregate(profiles_, out.statistics, s.aggregation_threshold);
            out.estimate = estimate_range_velocity(agg.profile);
            out.selected = agg.selected;
        }
        return out;
    }

    TrialScene draw_trial_scene(const ScenarioTemplate &tmpl, const SweepSetup &setup, Rng &scene_rng, Rng &amp_rng)
    {
        const auto limits = unambiguous_limits(setup.ofdm);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        Target t;
        t.bistatic_range = limits.range * (1.0 - unit(scene_rng));
        t.radial_velocity = limits.velocity * (unit(scene_rng) - 0.5);
        t.departure_az = tmpl.sector.max_azimuth * (2.0 * unit(scene_rng) - 1.0);
        t.departure_el = tmpl.sector.min_elevation + (tmpl.sector.max_elevation - tmpl.sector.min_elevation) * unit(scene_rng);
        if (tmpl.fixed_target)
        {
            t.bistatic_range = tmpl.fixed_target->range;
            t.radial_velocity = tmpl.fixed_target->velocity;
            t.departure_az = tmpl.fixed_target->azimuth;
            t.departure_el = tmpl.fixed_target->elevation;
        }
        t.arrival_az = t.departure_az;
        t.arrival_el = t.departure_el;
        t.rcs = tmpl.rcs;
        t.d_tx = std::max(t.bistatic_range / 2.0, 1.0);
        t.d_rx = t.d_tx;

        TrialScene trial;
        trial.best_beam = best_beam(setup.array, setup.grid, t.departure_az, t.departure_el);
        const BeamAngle &b = setup.grid.beams[trial.best_beam];
        trial.best_gain = std::abs(beam_gain(setup.array, t.departure_az, t.departure_el, b.azimuth, b.elevation));

        Scene &scene = trial.scene;
        scene.ofdm = setup.ofdm;
        scene.array = setup.array;
        scene.noise_power = tmpl.noiseless ? 0.0 : tmpl.noise_power;
        scene.ofdm.tx_power = tx_power_for_snr(db2lin(tmpl.snr_db), path_gain_beta(t, setup.ofdm.wavelength()),
                                               trial.best_gain, tmpl.noise_power, setup.array.num_elements());
        scene.targets.push_back(t);

        trial.alphas = draw_amplitudes(amp_rng, 1, tmpl.amplitude);
        return trial;
    }

    Scene noise_only_scene(const ScenarioTemplate &tmpl, const SweepSetup &setup)
    {
        Scene scene;
        scene.ofdm = setup.ofdm;
        scene.array = setup.array;
        scene.noise_power = tmpl.noiseless ? 0.0 : tmpl.noise_power;
        return scene;
    }

    double wrapped_error(double estimate, double truth, double period)
    {
        double e = std::fmod(estimate - truth + period / 2.0, period);
        if (e < 0.0)
            e += period;
        return e - period / 2.0;
    }
}
