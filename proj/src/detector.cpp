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

#include "ssbsense/detector.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

#include "ssbsense/parallel.hpp"

namespace ssbsense
{
    DetectionResult detect(std::span<const double> statistics, double threshold)
    {
        DetectionResult out;
        out.threshold = threshold;
        if (statistics.empty())
            return out;
        out.statistic = *std::max_element(statistics.begin(), statistics.end());
        out.target_present = out.statistic > threshold;
        return out;
    }

    DetectionResult detect(std::span<const double> statistics, std::span<const std::uint8_t> active, double threshold)
    {
        if (active.size() != statistics.size())
            throw ConfigError("one active flag per beam required");
        DetectionResult out;
        out.threshold = threshold;
        bool any = false;
        for (std::size_t r = 0; r < statistics.size(); ++r)
            if (active[r])
            {
                out.statistic = any ? std::max(out.statistic, statistics[r]) : statistics[r];
                any = true;
            }
        out.target_present = any && out.statistic > threshold;
        return out;
    }

    void DeactivationPolicy::validate() const
    {
        if (!(fraction >= 0.0 && fraction <= 1.0))
            throw ConfigError("deactivation fraction must lie in [0, 1]");
    }

    std::size_t deactivated_count(std::size_t num_beams, double fraction)
    {
        DeactivationPolicy{fraction, 0}.validate();
        return std::min<std::size_t>(num_beams, std::size_t(std::llround(fraction * double(num_beams))));
    }

    std::vector<std::size_t> random_order(std::size_t num_beams, Rng &rng)
    {
        std::vector<std::size_t> order(num_beams);
        std::iota(order.begin(), order.end(), std::size_t(0));
        // Fisher-Yates with an explicit distribution so the result does not depend on std::shuffle.
        for (std::size_t i = num_beams; i > 1; --i)
        {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(order[i - 1], order[pick(rng)]);
        }
        return order;
    }

    std::vector<std::uint8_t> active_beams(std::span<const std::size_t> order, std::size_t count)
    {
        std::vector<std::uint8_t> active(order.size(), 1);
        for (std::size_t i = 0; i < std::min(count, order.size()); ++i)
            active[order[i]] = 0;
        return active;
    }

    std::vector<std::uint8_t> deactivation_mask(std::size_t num_beams, double fraction, Rng &rng)
    {
        const auto order = random_order(num_beams, rng);
        return active_beams(order, deactivated_count(num_beams, fraction));
    }

    double MonteCarloCounts::pd_se() const
    {
        const double p = pd();
        return trials ? std::sqrt(p * (1.0 - p) / double(trials)) : 0.0;
    }

    double MonteCarloCounts::pfa_se() const
    {
        const double p = pfa();
        return trials ? std::sqrt(p * (1.0 - p) / double(trials)) : 0.0;
    }

    std::vector<TrialStatistics> simulate_trials(const DetectionScenario &scenario, std::size_t trials,
                                                 std::uint64_t seed, std::uint64_t deactivation_stream)
    {
        std::vector<TrialStatistics> out(trials);
        const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(trials, 1));
        std::vector<std::unique_ptr<SweepProcessor>> procs(workers);
        std::mutex init;

        parallel_for(trials, workers, [&](std::size_t w, std::size_t i) {
            if (!procs[w])
            {
                std::lock_guard lock(init);
                procs[w] = std::make_unique<SweepProcessor>(scenario.setup);
            }
            SweepProcessor &proc = *procs[w];

            Rng scene_rng = make_stream(seed, {i, id(Stream::Scene)});
            Rng amp_rng = make_stream(seed, {i, id(Stream::Amplitude)});
            Rng noise_rng = make_stream(seed, {i, id(Stream::Noise)});
            Rng noise0_rng = make_stream(seed, {i, id(Stream::NoiseOnly)});
            Rng order_rng = make_stream(seed, {i, id(Stream::Deactivation), deactivation_stream});

            const TrialScene trial = draw_trial_scene(scenario.scene, scenario.setup, scene_rng, amp_rng);
            out[i].h1 = proc.run(trial.scene, trial.alphas, noise_rng, false).statistics;

            const Scene empty = noise_only_scene(scenario.scene, scenario.setup);
            out[i].h0 = proc.run(empty, {}, noise0_rng, false).statistics;

            out[i].order = random_order(scenario.setup.grid.size(), order_rng);
        });
        return out;
    }

    MonteCarloCounts count_decisions(std::span<const TrialStatistics> trials, double threshold, double fraction)
    {
        MonteCarloCounts c;
        c.trials = trials.size();
        for (const auto &t : trials)
        {
            const auto active = active_beams(t.order, deactivated_count(t.order.size(), fraction));
            if (detect(t.h1, active, threshold).target_present)
                ++c.detections;
            if (detect(t.h0, active, threshold).target_present)
                ++c.false_alarms;
        }
        return c;
    }

    MonteCarloCounts monte_carlo_pd_pfa(const DetectionScenario &scenario, double threshold, std::size_t trials,
                                        const DeactivationPolicy &policy, std::uint64_t seed)
    {
        policy.validate();
        if (trials < 1)
            throw ConfigError("need at least one trial");
        const auto stats = simulate_trials(scenario, trials, seed, policy.stream);
        return count_decisions(stats, threshold, policy.fraction);
    }

    std::vector<CurveRow> deactivation_sweep(const DetectionScenario &scenario, std::span<const double> gammas,
                                             std::span<const double> fractions, std::size_t trials, std::uint64_t seed)
    {
        for (double f : fractions)
            DeactivationPolicy{f, 0}.validate();
        if (trials < 1)
            throw ConfigError("need at least one trial");

        const auto stats = simulate_trials(scenario, trials, seed, 0);
        std::vector<CurveRow> rows;
        for (double g : gammas)
            for (double f : fractions)
            {
                const auto c = count_decisions(stats, g, f);
                rows.push_back({g, f, c.trials, c.pd(), c.pd_se(), c.pfa(), c.pfa_se()});
            }
        return rows;
    }

    double calibrate_snr_for_pd(DetectionScenario scenario, double threshold, double target_pd, std::size_t trials,
                                std::uint64_t seed, double lo_db, double hi_db, double tol_db)
    {
        auto pd_at = [&](double snr_db) {
            scenario.scene.snr_db = snr_db;
            const auto stats = simulate_trials(scenario, trials, seed, 0);
            return count_decisions(stats, threshold, 0.0).pd();
        };

        if (pd_at(hi_db) < target_pd)
            return hi_db;
        if (pd_at(lo_db) >= target_pd)
            return lo_db;
        while (hi_db - lo_db > tol_db)
        {
            const double mid = 0.5 * (lo_db + hi_db);
            if (pd_at(mid) >= target_pd)
                hi_db = mid;
            else
                lo_db = mid;
        }
        return hi_db;
    }
}
