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

#ifndef SSBSENSE_DETECTOR_HPP
#define SSBSENSE_DETECTOR_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ssbsense/sweep.hpp"

namespace ssbsense
{
    struct DetectionResult
    {
        double statistic = 0.0; // max over active beams
        bool target_present = false;
        double threshold = 0.0;
    };

    /// H1 iff max statistic > threshold (strict). No beams means H0 with statistic 0.
    DetectionResult detect(std::span<const double> statistics, double threshold);

    /// Same, restricted to beams whose `active` flag is set.
    DetectionResult detect(std::span<const double> statistics, std::span<const std::uint8_t> active, double threshold);

    struct DeactivationPolicy
    {
        double fraction = 0.0; // share of surveillance beams switched off
        std::uint64_t stream = 0;

        void validate() const;
    };

    /// round(fraction * R)
    std::size_t deactivated_count(std::size_t num_beams, double fraction);

    /// Uniform random permutation of [0, R). Deactivating its first k entries draws k beams without replacement.
    std::vector<std::size_t> random_order(std::size_t num_beams, Rng &rng);

    /// Active flags with the first `count` beams of `order` switched off.
    std::vector<std::uint8_t> active_beams(std::span<const std::size_t> order, std::size_t count);

    std::vector<std::uint8_t> deactivation_mask(std::size_t num_beams, double fraction, Rng &rng);

    struct MonteCarloCounts
    {
        std::size_t trials = 0;
        std::size_t detections = 0;   // H1 trials above threshold
        std::size_t false_alarms = 0; // H0 trials above threshold

        double pd() const { return trials ? double(detections) / double(trials) : 0.0; }
        double pfa() const { return trials ? double(false_alarms) / double(trials) : 0.0; }
        double pd_se() const;
        double pfa_se() const;
    };

    struct DetectionScenario
    {
        SweepSetup setup;
        ScenarioTemplate scene;
    };

    /// Per-beam statistics of one trial under both hypotheses.
    struct TrialStatistics
    {
        std::vector<double> h1;
        std::vector<double> h0;
        std::vector<std::size_t> order; // deactivation order
    };

    /**
     * @brief Statistics of trials [0, trials) for one scenario.
     *
     * Trial i uses substreams of (seed, i): target geometry and amplitude for H1,
     * independent noise for each hypothesis, and one deactivation order shared
     * by both hypotheses.
     */
    std::vector<TrialStatistics> simulate_trials(const DetectionScenario &scenario, std::size_t trials,
                                                 std::uint64_t seed, std::uint64_t deactivation_stream = 0);

    MonteCarloCounts count_decisions(std::span<const TrialStatistics> trials, double threshold, double fraction);

    /// Pd from H1 trials and Pfa from K = 0 trials at one threshold and deactivation policy.
    MonteCarloCounts monte_carlo_pd_pfa(const DetectionScenario &scenario, double threshold, std::size_t trials,
                                        const DeactivationPolicy &policy, std::uint64_t seed);

    struct CurveRow
    {
        double gamma = 0.0;
        double fraction = 0.0;
        std::size_t trials = 0;
        double pd = 0.0;
        double pd_se = 0.0;
        double pfa = 0.0;
        double pfa_se = 0.0;
    };

    /// Pd/Pfa for every (threshold, fraction); trials are shared across points. Rows ordered by gamma then fraction.
    std::vector<CurveRow> deactivation_sweep(const DetectionScenario &scenario, std::span<const double> gammas,
                                             std::span<const double> fractions, std::size_t trials, std::uint64_t seed);

    /**
     * @brief SNR_r (dB) at which full-beam Pd reaches `target_pd`.
     *
     * Bisection on [lo_db, hi_db] with common random numbers across
     * evaluations; stops when the bracket is narrower than `tol_db`.
     */
    double calibrate_snr_for_pd(DetectionScenario scenario, double threshold, double target_pd, std::size_t trials,
                                std::uint64_t seed, double lo_db, double hi_db, double tol_db = 0.1);
}

#endif
