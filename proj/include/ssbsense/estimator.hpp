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

#ifndef SSBSENSE_ESTIMATOR_HPP
#define SSBSENSE_ESTIMATOR_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ssbsense/channel.hpp"
#include "ssbsense/waveform.hpp"

namespace ssbsense
{
    /// Zero-padded transform sizes: N'-point IFFT over subcarriers, L'-point FFT over symbols.
    struct ProfileConfig
    {
        std::size_t n_fft = 960;
        std::size_t l_fft = 64;

        /// Defaults used throughout: N' = 4N, L' = 16L.
        static ProfileConfig padded(const OfdmFrameConfig &ofdm, std::size_t n_factor = 4, std::size_t l_factor = 16)
        {
            return {ofdm.n_subcarriers * n_factor, ofdm.n_symbols * l_factor};
        }

        /// Throws ConfigError unless N' > N and L' > L.
        void validate_for(const OfdmFrameConfig &ofdm) const;
    };

    /**
     * @brief Magnitude of the 2D transform of one beam frame, N' x L'.
     *
     * Row n' maps to bistatic range n' * range_per_bin, column l' to velocity
     * l' * velocity_per_bin with the upper half of the columns wrapped to
     * negative velocities.
     */
    struct RangeVelocityProfile
    {
        RMatrix values;
        double range_per_bin = 0.0;    // m, c T_s / N'
        double velocity_per_bin = 0.0; // m/s, f_delta lambda / (2 L')

        /// Column index to signed bin: l' > L'/2 becomes l' - L'.
        long signed_velocity_bin(std::size_t l) const
        {
            const std::size_t lf = values.cols();
            return 2 * l > lf ? long(l) - long(lf) : long(l);
        }
    };

    /**
     * @brief Computes range-velocity profiles for a fixed (N, L, N', L').
     *
     * Entry (n', l') is |sum_n sum_l Z[n,l] exp(-j 2 pi l' l / L') exp(+j 2 pi n' n / N')|,
     * evaluated as row-wise forward FFTs followed by column-wise backward FFTs
     * (unnormalized). Owns its FFTW plans and work buffer; one instance per thread.
     */
    class ProfileProcessor
    {
    public:
        ProfileProcessor(const OfdmFrameConfig &ofdm, const ProfileConfig &cfg);
        ~ProfileProcessor();
        ProfileProcessor(ProfileProcessor &&) noexcept;
        ProfileProcessor &operator=(ProfileProcessor &&) noexcept;
        ProfileProcessor(const ProfileProcessor &) = delete;
        ProfileProcessor &operator=(const ProfileProcessor &) = delete;

        RangeVelocityProfile compute(const CMatrix &frame);

        /// Reuses `out` storage; out.values is resized if needed.
        void compute_into(const CMatrix &frame, RangeVelocityProfile &out);

        const ProfileConfig &config() const { return cfg_; }

    private:
        struct Plans;
        OfdmFrameConfig ofdm_;
        ProfileConfig cfg_;
        std::unique_ptr<Plans> plans_;
    };

    /// One-shot helper; prefer ProfileProcessor in loops.
    RangeVelocityProfile range_velocity_profile(const RxBeamFrame &frame, const OfdmFrameConfig &ofdm,
                                                const ProfileConfig &cfg);

    /// Raw peak-to-average factor: max / sum. Zero for an all-zero profile.
    double paf(const RangeVelocityProfile &profile);

    /// Statistic compared against the aggregation and detection thresholds.
    enum class PafStatistic
    {
        PeakOverRms,  // max / sqrt(mean of squares)
        PeakOverMean, // max / mean = paf * N' L'
    };

    PafStatistic parse_paf_statistic(const std::string &name);
    std::string to_string(PafStatistic s);

    /// Thresholded statistic of a profile; zero for an all-zero profile.
    double paf_statistic(const RangeVelocityProfile &profile, PafStatistic kind);

    struct Aggregate
    {
        RangeVelocityProfile profile;
        std::vector<std::size_t> selected; // eta, ascending
    };

    /**
     * @brief Non-coherent beam aggregation.
     *
     * Averages the profiles whose statistic exceeds `threshold`. If none does,
     * the single beam with the largest statistic is used (lowest index on ties).
     */
    Aggregate aggregate(std::span<const RangeVelocityProfile> profiles, std::span<const double> statistics,
                        double threshold);
    Aggregate aggregate(std::span<const RangeVelocityProfile> profiles, double threshold, PafStatistic kind);

    struct RangeVelocityEstimate
    {
        double range = 0.0;    // m
        double velocity = 0.0; // m/s
        std::size_t n_hat = 0;
        std::size_t l_hat = 0;
    };

    /// Global peak; ties resolve to the smallest n', then the smallest l'.
    RangeVelocityEstimate estimate_range_velocity(const RangeVelocityProfile &profile);

    /// CSV export: header then one row per range bin, first column the range in meters.
    std::string profile_to_csv(const RangeVelocityProfile &profile);
}

#endif
