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

#include "ssbsense/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include <fftw3.h>

namespace ssbsense
{
    namespace
    {
        // FFTW planning is not thread-safe; execution on distinct plans is.
        std::mutex &planner_mutex()
        {
            static std::mutex m;
            return m;
        }
    }

    void ProfileConfig::validate_for(const OfdmFrameConfig &ofdm) const
    {
        if (n_fft <= ofdm.n_subcarriers || l_fft <= ofdm.n_symbols)
            throw ConfigError("zero padding requires N' > N and L' > L, got N'=" + std::to_string(n_fft) +
                              " N=" + std::to_string(ofdm.n_subcarriers) + " L'=" + std::to_string(l_fft) +
                              " L=" + std::to_string(ofdm.n_symbols));
    }

    struct ProfileProcessor::Plans
    {
        fftw_complex *buffer = nullptr;
        fftw_plan rows = nullptr;
        fftw_plan cols = nullptr;

        Plans(std::size_t n, std::size_t nf, std::size_t lf)
        {
            std::lock_guard lock(planner_mutex());
            buffer = fftw_alloc_complex(nf * lf);
            if (!buffer)
                throw std::bad_alloc();

            // Buffer is column-major (N' x L') so the long transforms run on contiguous data.
            // Forward L'-point FFT of the first N rows (the rest are padding).
            int len_l = int(lf);
            rows = fftw_plan_many_dft(1, &len_l, int(n), buffer, nullptr, int(nf), 1, buffer, nullptr, int(nf), 1,
                                      FFTW_FORWARD, FFTW_ESTIMATE);
            // Backward N'-point FFT down each of the L' columns.
            int len_n = int(nf);
            cols = fftw_plan_many_dft(1, &len_n, int(lf), buffer, nullptr, 1, int(nf), buffer, nullptr, 1, int(nf),
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
            if (!rows || !cols)
                throw std::runtime_error("FFTW planning failed");
        }

        ~Plans()
        {
            std::lock_guard lock(planner_mutex());
            if (rows)
                fftw_destroy_plan(rows);
            if (cols)
                fftw_destroy_plan(cols);
            fftw_free(buffer);
        }
    };

    ProfileProcessor::ProfileProcessor(const OfdmFrameConfig &ofdm, const ProfileConfig &cfg)
        : ofdm_(ofdm), cfg_(cfg)
    {
        if (cfg.n_fft < ofdm.n_subcarriers || cfg.l_fft < ofdm.n_symbols)
            throw ConfigError("transform size smaller than the frame");
        plans_ = std::make_unique<Plans>(ofdm.n_subcarriers, cfg.n_fft, cfg.l_fft);
    }

    ProfileProcessor::~ProfileProcessor() = default;
    ProfileProcessor::ProfileProcessor(ProfileProcessor &&) noexcept = default;
    ProfileProcessor &ProfileProcessor::operator=(ProfileProcessor &&) noexcept = default;

    RangeVelocityProfile ProfileProcessor::compute(const CMatrix &frame)
    {
        RangeVelocityProfile out;
        compute_into(frame, out);
        return out;
    }

    void ProfileProcessor::compute_into(const CMatrix &frame, RangeVelocityProfile &out)
    {
        const std::size_t n = ofdm_.n_subcarriers, l = ofdm_.n_symbols;
        const std::size_t nf = cfg_.n_fft, lf = cfg_.l_fft;
        if (frame.rows() != n || frame.cols() != l)
            throw ConfigError("frame is " + std::to_string(frame.rows()) + "x" + std::to_string(frame.cols()) +
                              ", processor expects " + std::to_string(n) + "x" + std::to_string(l));

        fftw_complex *buf = plans_->buffer;
        std::fill_n(&buf[0][0], 2 * nf * lf, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < l; ++j)
            {
                buf[j * nf + i][0] = frame(i, j).real();
                buf[j * nf + i][1] = frame(i, j).imag();
            }

        fftw_execute(plans_->rows);
        fftw_execute(plans_->cols);

        if (out.values.rows() != nf || out.values.cols() != lf)
            out.values = RMatrix(nf, lf);
        for (std::size_t j = 0; j < lf; ++j)
            for (std::size_t i = 0; i < nf; ++i)
            {
                const fftw_complex &z = buf[j * nf + i];
                out.values(i, j) = std::sqrt(z[0] * z[0] + z[1] * z[1]);
            }

        out.range_per_bin = kSpeedOfLight * ofdm_.symbol_duration() / double(nf);
        out.velocity_per_bin = ofdm_.subcarrier_spacing * ofdm_.wavelength() / (2.0 * double(lf));
    }

    RangeVelocityProfile range_velocity_profile(const RxBeamFrame &frame, const OfdmFrameConfig &ofdm,
                                                const ProfileConfig &cfg)
    {
        ProfileProcessor proc(ofdm, cfg);
        return proc.compute(frame.samples);
    }

    double paf(const RangeVelocityProfile &profile)
    {
        const auto v = profile.values.flat();
        if (v.empty())
            throw ConfigError("empty profile");
        double peak = 0.0, sum = 0.0;
        for (double x : v)
        {
            peak = std::max(peak, x);
            sum += x;
        }
        return sum > 0.0 ? peak / sum : 0.0;
    }

    PafStatistic parse_paf_statistic(const std::string &name)
    {
        if (name == "peak_over_rms")
            return PafStatistic::PeakOverRms;
        if (name == "peak_over_mean")
            return PafStatistic::PeakOverMean;
        throw ConfigError("unknown PAF statistic '" + name + "' (expected peak_over_rms or peak_over_mean)");
    }

    std::string to_string(PafStatistic s)
    {
        return s == PafStatistic::PeakOverRms ? "peak_over_rms" : "peak_over_mean";
    }

    double paf_statistic(const RangeVelocityProfile &profile, PafStatistic kind)
    {
        const auto v = profile.values.flat();
        if (v.empty())
            throw ConfigError("empty profile");
        const double cells = double(v.size());
        if (kind == PafStatistic::PeakOverMean)
            return paf(profile) * cells;

        double peak = 0.0, sq = 0.0;
        for (double x : v)
        {
            peak = std::max(peak, x);
            sq += x * x;
        }
        return sq > 0.0 ? peak / std::sqrt(sq / cells) : 0.0;
    }

    Aggregate aggregate(std::span<const RangeVelocityProfile> profiles, std::span<const double> statistics,
                        double threshold)
    {
        if (profiles.empty())
            throw ConfigError("aggregation needs at least one profile");
        if (statistics.size() != profiles.size())
            throw ConfigError("one statistic per profile required");

        Aggregate agg;
        for (std::size_t i = 0; i < statistics.size(); ++i)
            if (statistics[i] > threshold)
                agg.selected.push_back(i);
        if (agg.selected.empty())
            agg.selected.push_back(std::size_t(std::max_element(statistics.begin(), statistics.end()) - statistics.begin()));

        const RangeVelocityProfile &first = profiles[agg.selected.front()];
        agg.profile = first;
        if (agg.selected.size() == 1)
            return agg;

        auto acc = agg.profile.values.flat();
        for (std::size_t k = 1; k < agg.selected.size(); ++k)
        {
            const auto src = profiles[agg.selected[k]].values.flat();
            if (src.size() != acc.size())
                throw ConfigError("profiles differ in size");
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc[i] += src[i];
        }
        const double inv = 1.0 / double(agg.selected.size());
        for (double &x : acc)
            x *= inv;
        return agg;
    }

    Aggregate aggregate(std::span<const RangeVelocityProfile> profiles, double threshold, PafStatistic kind)
    {
        std::vector<double> stats;
        stats.reserve(profiles.size());
        for (const auto &p : profiles)
            stats.push_back(paf_statistic(p, kind));
        return aggregate(profiles, stats, threshold);
    }

    RangeVelocityEstimate estimate_range_velocity(const RangeVelocityProfile &profile)
    {
        const auto v = profile.values.flat();
        if (v.empty())
            throw ConfigError("empty profile");
        // max_element returns the first maximum, i.e. the smallest row-major index.
        const std::size_t idx = std::size_t(std::max_element(v.begin(), v.end()) - v.begin());

        RangeVelocityEstimate est;
        est.n_hat = idx / profile.values.cols();
        est.l_hat = idx % profile.values.cols();
        est.range = double(est.n_hat) * profile.range_per_bin;
        est.velocity = double(profile.signed_velocity_bin(est.l_hat)) * profile.velocity_per_bin;
        return est;
    }

    std::string profile_to_csv(const RangeVelocityProfile &profile)
    {
        std::string out = "range_m";
        char buf[64];
        for (std::size_t l = 0; l < profile.values.cols(); ++l)
        {
            std::snprintf(buf, sizeof buf, ",v%.17g", double(profile.signed_velocity_bin(l)) * profile.velocity_per_bin);
            out += buf;
        }
        out += '\n';
        for (std::size_t n = 0; n < profile.values.rows(); ++n)
        {
            std::snprintf(buf, sizeof buf, "%.17g", double(n) * profile.range_per_bin);
            out += buf;
            for (double x : profile.values.row(n))
            {
                std::snprintf(buf, sizeof buf, ",%.17g", x);
                out += buf;
            }
            out += '\n';
        }
        return out;
    }
}
