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

#include "ssbsense/channel.hpp"

#include <cmath>
#include <string>

namespace ssbsense
{
    void Target::validate() const
    {
        if (!(bistatic_range >= 0.0) || !std::isfinite(bistatic_range))
            throw DomainError("bistatic range must be finite and non-negative");
        if (!std::isfinite(radial_velocity))
            throw DomainError("radial velocity must be finite");
        if (!(d_tx > 0.0) || !(d_rx > 0.0))
            throw DomainError("transmitter and receiver distances must be positive");
        if (!(rcs > 0.0))
            throw DomainError("radar cross section must be positive");
    }

    void Scene::validate() const
    {
        ofdm.validate();
        array.validate();
        if (!(noise_power >= 0.0))
            throw ConfigError("noise power must be non-negative");
        if (!(direct_leakage >= 0.0))
            throw ConfigError("direct-link leakage must be non-negative");
        for (const auto &t : targets)
            t.validate();
    }

    double path_gain_beta(const Target &target, double wavelength)
    {
        if (!(target.d_tx > 0.0) || !(target.d_rx > 0.0))
            throw DomainError("path gain needs positive distances");
        const double four_pi_cubed = std::pow(4.0 * kPi, 3);
        return wavelength * wavelength * target.rcs /
               (four_pi_cubed * target.d_tx * target.d_tx * target.d_rx * target.d_rx);
    }

    std::vector<cplx> draw_swerling1(Rng &rng, std::size_t k)
    {
        ComplexGaussian cn(1.0);
        std::vector<cplx> alpha(k);
        for (auto &a : alpha)
            a = cn(rng);
        return alpha;
    }

    std::vector<cplx> draw_amplitudes(Rng &rng, std::size_t k, AmplitudeModel model)
    {
        if (model == AmplitudeModel::Swerling1)
            return draw_swerling1(rng, k);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        std::vector<cplx> alpha(k);
        for (auto &a : alpha)
            a = std::polar(1.0, phase(rng));
        return alpha;
    }

    namespace
    {
        // Separable per-target contribution: coef_r * delay(n) * doppler(l) at antenna m scaled by arrival(m).
        struct Echo
        {
            std::vector<cplx> per_beam; // sqrt(rho beta) alpha [a_d^T f_r]
            std::vector<cplx> arrival;  // a(arrival), length M
            std::vector<cplx> delay;    // length N
            std::vector<cplx> doppler;  // length L
        };

        std::vector<cplx> project_departure(const std::vector<cplx> &a_dep, const CMatrix &precoder)
        {
            std::vector<cplx> out(precoder.cols(), cplx{});
            for (std::size_t i = 0; i < precoder.rows(); ++i)
                for (std::size_t r = 0; r < precoder.cols(); ++r)
                    out[r] += a_dep[i] * precoder(i, r);
            return out;
        }
    }

    std::vector<RxBeamFrame> synthesize_rx_frames(const Scene &scene, const BeamGrid &grid, const CMatrix &precoder,
                                                  const SsbMask &mask, std::span<const cplx> alphas, Rng &noise_rng,
                                                  const SynthesisOptions &options)
    {
        scene.validate();
        const auto &ofdm = scene.ofdm;
        const std::size_t n_sc = ofdm.n_subcarriers;
        const std::size_t n_sym = ofdm.n_symbols;
        const std::size_t m_ant = scene.array.num_elements();
        const std::size_t n_beams = grid.size();

        if (precoder.rows() != m_ant || precoder.cols() != n_beams)
            throw ConfigError("precoder is " + std::to_string(precoder.rows()) + "x" + std::to_string(precoder.cols()) +
                              ", expected " + std::to_string(m_ant) + "x" + std::to_string(n_beams));
        if (mask.n_subcarriers() != n_sc || mask.n_symbols() != n_sym)
            throw ConfigError("mask dimensions do not match the OFDM block");
        if (alphas.size() != scene.targets.size())
            throw ConfigError("need one amplitude per target");

        const double lambda = ofdm.wavelength();
        const double ts = ofdm.symbol_duration();
        const double sqrt_rho = std::sqrt(ofdm.tx_power);

        std::vector<Echo> echoes;
        echoes.reserve(scene.targets.size() + 1);
        for (std::size_t k = 0; k < scene.targets.size(); ++k)
        {
            const Target &t = scene.targets[k];
            Echo e;
            const cplx amp = sqrt_rho * alphas[k] * std::sqrt(path_gain_beta(t, lambda));
            e.per_beam = project_departure(steering_vector(scene.array, t.departure_az, t.departure_el), precoder);
            for (auto &c : e.per_beam)
                c *= amp;
            e.arrival = steering_vector(scene.array, t.arrival_az, t.arrival_el);
            e.delay.resize(n_sc);
            for (std::size_t n = 0; n < n_sc; ++n)
                e.delay[n] = std::polar(1.0, -2.0 * kPi * double(n) * ofdm.subcarrier_spacing * t.bistatic_range / kSpeedOfLight);
            e.doppler.resize(n_sym);
            for (std::size_t l = 0; l < n_sym; ++l)
                e.doppler[l] = std::polar(1.0, 4.0 * kPi * t.radial_velocity * double(l) * ts / lambda);
            echoes.push_back(std::move(e));
        }

        if (scene.direct_leakage > 0.0)
        {
            const auto &dl = scene.direct_link;
            const double beta0 = std::pow(lambda / (4.0 * kPi * dl.baseline), 2);
            const double tau0 = dl.baseline / kSpeedOfLight;
            Echo e;
            e.per_beam = project_departure(steering_vector(scene.array, dl.departure_az, dl.departure_el), precoder);
            const cplx amp = scene.direct_leakage * sqrt_rho * std::sqrt(beta0) *
                             std::polar(1.0, -2.0 * kPi * std::fmod(ofdm.carrier * tau0, 1.0));
            for (auto &c : e.per_beam)
                c *= amp;
            e.arrival = steering_vector(scene.array, dl.arrival_az, dl.arrival_el);
            e.delay.resize(n_sc);
            for (std::size_t n = 0; n < n_sc; ++n)
                e.delay[n] = std::polar(1.0, -2.0 * kPi * double(n) * ofdm.subcarrier_spacing * tau0);
            e.doppler.assign(n_sym, cplx{1.0, 0.0});
            echoes.push_back(std::move(e));
        }

        const std::uint64_t noise_base = noise_rng();
        const bool noisy = scene.noise_power > 0.0;
        const std::size_t n_ant_out = options.full_tensor ? m_ant : 1;

        std::vector<RxBeamFrame> frames(n_beams);
        for (std::size_t r = 0; r < n_beams; ++r)
        {
            RxBeamFrame &frame = frames[r];
            frame.beam = r;
            Rng beam_rng = make_stream(noise_base, {r});
            ComplexGaussian noise(scene.noise_power);

            std::vector<cplx> grid_out(n_ant_out * n_sc * n_sym);
            for (std::size_t m = 0; m < n_ant_out; ++m)
            {
                cplx *out = grid_out.data() + m * n_sc * n_sym;
                for (const Echo &e : echoes)
                {
                    const cplx coef = e.per_beam[r] * e.arrival[m];
                    for (std::size_t n = 0; n < n_sc; ++n)
                    {
                        const cplx cn = coef * e.delay[n];
                        for (std::size_t l = 0; l < n_sym; ++l)
                            if (mask.active(n, l))
                                out[n * n_sym + l] += cn * e.doppler[l];
                    }
                }
                if (noisy)
                    for (std::size_t i = 0; i < n_sc * n_sym; ++i)
                        out[i] += noise(beam_rng);
            }

            frame.samples = CMatrix(n_sc, n_sym);
            std::copy(grid_out.begin(), grid_out.begin() + std::ptrdiff_t(n_sc * n_sym), frame.samples.data());
            if (options.full_tensor)
                frame.tensor = std::move(grid_out);
        }
        return frames;
    }

    std::vector<RxBeamFrame> synthesize_rx_frames(const Scene &scene, const BeamGrid &grid, const CMatrix &precoder,
                                                  const SsbMask &mask, Rng &rng, const SynthesisOptions &options)
    {
        const auto alphas = draw_swerling1(rng, scene.targets.size());
        return synthesize_rx_frames(scene, grid, precoder, mask, alphas, rng, options);
    }

    UnambiguousLimits unambiguous_limits(const OfdmFrameConfig &cfg)
    {
        return {kSpeedOfLight * cfg.symbol_duration(), cfg.wavelength() * cfg.subcarrier_spacing / 2.0};
    }
}
