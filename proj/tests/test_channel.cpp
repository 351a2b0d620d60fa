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

#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ssbsense/channel.hpp"
#include "ssbsense/crb.hpp"

using namespace ssbsense;

namespace
{
    struct Fixture
    {
        OfdmFrameConfig ofdm;
        ArrayConfig array{10, 10};
        BeamGrid grid = beam_grid(array, true);
        CMatrix f = precoder(grid, array);
        SsbMask full = SsbMask::full(ofdm);

        std::size_t beam(int q_az, int q_el) const
        {
            for (std::size_t r = 0; r < grid.size(); ++r)
                if (grid.beams[r].q_az == q_az && grid.beams[r].q_el == q_el)
                    return r;
            FAIL("no such beam");
            return 0;
        }

        Target on_beam(std::size_t r, double d, double v) const
        {
            Target t;
            t.bistatic_range = d;
            t.radial_velocity = v;
            t.departure_az = t.arrival_az = grid.beams[r].azimuth;
            t.departure_el = t.arrival_el = grid.beams[r].elevation;
            return t;
        }
    };

    double max_abs_diff(const CMatrix &a, const CMatrix &b)
    {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
        return m;
    }
}

TEST_CASE("bistatic path gain")
{
    Target t;
    t.rcs = 0.1;
    t.d_tx = t.d_rx = 150.0;
    const double ref = 0.02 * 0.02 * 0.1 / (std::pow(4 * oracle::pi, 3) * std::pow(150.0, 4));
    CHECK(path_gain_beta(t, 0.02) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(path_gain_beta(t, 0.02) == doctest::Approx(3.98e-17).epsilon(0.005));

    Target far = t;
    far.d_tx *= 2;
    far.d_rx *= 2;
    CHECK(path_gain_beta(far, 0.02) == doctest::Approx(path_gain_beta(t, 0.02) / 16).epsilon(1e-14));

    Target faint = t;
    faint.rcs = 1e-30;
    CHECK(path_gain_beta(faint, 0.02) < 1e-45);
    CHECK(path_gain_beta(faint, 0.02) > 0.0);

    Target zero = t;
    zero.d_rx = 0.0;
    CHECK_THROWS_AS(path_gain_beta(zero, 0.02), DomainError);
}

TEST_CASE("Swerling-1 amplitude statistics")
{
    Rng rng = make_stream(2024, {1});
    const auto a = draw_swerling1(rng, 100000);
    double p = 0, vr = 0, vi = 0, mr = 0, mi = 0;
    for (const auto &x : a)
    {
        p += std::norm(x);
        mr += x.real();
        mi += x.imag();
    }
    mr /= double(a.size());
    mi /= double(a.size());
    for (const auto &x : a)
    {
        vr += (x.real() - mr) * (x.real() - mr);
        vi += (x.imag() - mi) * (x.imag() - mi);
    }
    CHECK(std::abs(p / double(a.size()) - 1.0) < 0.02);
    CHECK(std::abs(vr / double(a.size()) - 0.5) < 0.01);
    CHECK(std::abs(vi / double(a.size()) - 0.5) < 0.01);

    Rng r1 = make_stream(99, {}), r2 = make_stream(99, {});
    CHECK(draw_swerling1(r1, 8) == draw_swerling1(r2, 8));

    Rng rc = make_stream(5, {});
    for (const auto &x : draw_amplitudes(rc, 100, AmplitudeModel::ConstantModulus))
        CHECK(std::abs(std::abs(x) - 1.0) < 1e-15);
}

TEST_CASE("no targets and no noise give zero frames")
{
    Fixture fx;
    Scene scene;
    scene.noise_power = 0.0;
    Rng rng = make_stream(1, {});
    const auto frames = synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span<const cplx>{}, rng);
    REQUIRE(frames.size() == 45);
    for (const auto &fr : frames)
        for (const auto &x : fr.samples.flat())
            CHECK(x == cplx{});
}

TEST_CASE("noiseless on-boresight frame: constant modulus and linear phase")
{
    Fixture fx;
    const std::size_t r0 = fx.beam(2, 1);
    Scene scene;
    scene.noise_power = 0.0;
    scene.ofdm.tx_power = 3.0;
    const double d = 321.0, v = 12.5;
    scene.targets.push_back(fx.on_beam(r0, d, v));
    const cplx alpha(0.6, -0.8);
    Rng rng = make_stream(3, {});
    const auto frames = synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span<const cplx>(&alpha, 1), rng);

    const double beta = path_gain_beta(scene.targets[0], scene.ofdm.wavelength());
    const double expected = std::sqrt(3.0) * std::sqrt(beta) * 1.0 * 100.0 / 10.0;
    const CMatrix &z = frames[r0].samples;
    const double ts = scene.ofdm.symbol_duration(), lambda = scene.ofdm.wavelength();
    for (std::size_t n = 0; n < 240; ++n)
        for (std::size_t l = 0; l < 4; ++l)
        {
            CHECK(std::abs(z(n, l)) == doctest::Approx(expected).epsilon(1e-10));
            const cplx ref = z(0, 0) * std::exp(cplx(0, -2 * oracle::pi * double(n) * 60e3 * d / oracle::c0 +
                                                         4 * oracle::pi * v * double(l) * ts / lambda));
            CHECK(std::abs(z(n, l) - ref) < 1e-9 * expected);
        }
    // sample (0,0) carries the amplitude phase only
    CHECK(std::abs(z(0, 0) / std::abs(z(0, 0)) - alpha) < 1e-10);
}

TEST_CASE("noiseless single-target frame is rank one")
{
    Fixture fx;
    Scene scene;
    scene.noise_power = 0.0;
    Target t;
    t.bistatic_range = 1234.5;
    t.radial_velocity = -77.7;
    t.departure_az = t.arrival_az = 0.31;
    t.departure_el = t.arrival_el = 0.17;
    scene.targets.push_back(t);
    Rng rng = make_stream(4, {});
    const auto frames = synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, rng);
    for (std::size_t r : {std::size_t(0), std::size_t(22), std::size_t(40)})
    {
        const CMatrix &z = frames[r].samples;
        Eigen::MatrixXcd m(240, 4);
        for (std::size_t n = 0; n < 240; ++n)
            for (std::size_t l = 0; l < 4; ++l)
                m(Eigen::Index(n), Eigen::Index(l)) = z(n, l);
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        const auto s = svd.singularValues();
        REQUIRE(s(0) > 0.0);
        CHECK(s(1) / s(0) < 1e-9);
    }
}

TEST_CASE("synthesis is linear in targets and deterministic in the seed")
{
    Fixture fx;
    Target a = fx.on_beam(fx.beam(0, 0), 500.0, 30.0);
    Target b = fx.on_beam(fx.beam(-3, 2), 2100.0, -150.0);
    b.departure_az = b.arrival_az = b.departure_az + 0.02;
    const std::vector<cplx> alpha_ab{{1.0, 0.5}, {-0.3, 0.9}};

    Scene ab, only_a, only_b;
    ab.targets = {a, b};
    only_a.targets = {a};
    only_a.noise_power = 0.0;
    only_b.targets = {b};
    ab.ofdm.tx_power = only_a.ofdm.tx_power = only_b.ofdm.tx_power = 1e12;

    Rng n1 = make_stream(77, {}), n2 = make_stream(42, {}), n3 = make_stream(77, {});
    const auto f_ab = synthesize_rx_frames(ab, fx.grid, fx.f, fx.full, alpha_ab, n1);
    const auto f_a = synthesize_rx_frames(only_a, fx.grid, fx.f, fx.full, std::span(alpha_ab).first(1), n2);
    const auto f_b = synthesize_rx_frames(only_b, fx.grid, fx.f, fx.full, std::span(alpha_ab).last(1), n3);

    double scale = 0.0;
    for (const auto &fr : f_ab)
        for (const auto &x : fr.samples.flat())
            scale = std::max(scale, std::abs(x));
    for (std::size_t r = 0; r < f_ab.size(); ++r)
    {
        CMatrix sum = f_a[r].samples;
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum.data()[i] += f_b[r].samples.data()[i];
        CHECK(max_abs_diff(sum, f_ab[r].samples) <= 1e-12 * scale);
    }

    Rng again = make_stream(77, {});
    const auto repeat = synthesize_rx_frames(ab, fx.grid, fx.f, fx.full, alpha_ab, again);
    for (std::size_t r = 0; r < f_ab.size(); ++r)
        CHECK(repeat[r].samples == f_ab[r].samples);

    Rng other = make_stream(78, {});
    const auto different = synthesize_rx_frames(ab, fx.grid, fx.f, fx.full, alpha_ab, other);
    CHECK_FALSE(different[0].samples == f_ab[0].samples);
}

TEST_CASE("per-RE signal power matches the receive SNR")
{
    Fixture fx;
    const double snr = db2lin(-3.0);
    Target t;
    t.bistatic_range = 800.0;
    t.departure_az = t.arrival_az = 0.4;
    t.departure_el = t.arrival_el = 0.25;
    const std::size_t rb = best_beam(fx.array, fx.grid, t.departure_az, t.departure_el);
    const double g = std::abs(beam_gain(fx.array, t.departure_az, t.departure_el, fx.grid.beams[rb].azimuth,
                                        fx.grid.beams[rb].elevation));

    Scene scene;
    scene.targets = {t};
    const double sigma2 = scene.noise_power;
    scene.ofdm.tx_power = tx_power_for_snr(snr, path_gain_beta(t, scene.ofdm.wavelength()), g, sigma2, 100);
    CHECK(receive_snr(scene.ofdm.tx_power, path_gain_beta(t, scene.ofdm.wavelength()), g, sigma2, 100) ==
          doctest::Approx(snr).epsilon(1e-12));
    scene.noise_power = 0.0;

    Rng amp = make_stream(31337, {id(Stream::Amplitude)});
    const auto alphas = draw_swerling1(amp, 1000);
    double acc = 0.0;
    std::size_t count = 0;
    for (const cplx &alpha : alphas)
    {
        Rng unused = make_stream(0, {});
        const auto frames = synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span(&alpha, 1), unused);
        for (const auto &x : frames[rb].samples.flat())
        {
            acc += std::norm(x);
            ++count;
        }
    }
    const double measured = acc / double(count) / sigma2;
    MESSAGE("measured per-RE SNR " << measured << " vs " << snr);
    CHECK(std::abs(measured / snr - 1.0) < 0.05);
}

TEST_CASE("masked-out resource elements carry noise only")
{
    Fixture fx;
    const SsbMask ssb = default_ssb_mask(fx.ofdm);
    Scene scene;
    scene.targets = {fx.on_beam(fx.beam(0, 0), 400.0, 0.0)};
    scene.ofdm.tx_power = 1e12;

    Scene quiet = scene;
    quiet.noise_power = 0.0;
    const cplx one{1.0, 0.0};
    Rng r1 = make_stream(5, {});
    const auto clean = synthesize_rx_frames(quiet, fx.grid, fx.f, ssb, std::span(&one, 1), r1);
    for (std::size_t n = 0; n < 240; ++n)
        for (std::size_t l = 0; l < 4; ++l)
            CHECK((clean[22].samples(n, l) != cplx{}) == ssb.active(n, l));

    Scene noise_only = scene;
    noise_only.targets.clear();
    Rng r2 = make_stream(6, {}), r3 = make_stream(6, {});
    const auto noisy = synthesize_rx_frames(scene, fx.grid, fx.f, ssb, std::span(&one, 1), r2);
    const auto pure = synthesize_rx_frames(noise_only, fx.grid, fx.f, ssb, std::span<const cplx>{}, r3);
    for (std::size_t n = 0; n < 240; ++n)
        for (std::size_t l = 0; l < 4; ++l)
            if (!ssb.active(n, l))
                CHECK(noisy[22].samples(n, l) == pure[22].samples(n, l));
}

TEST_CASE("full antenna tensor")
{
    Fixture fx;
    Scene scene;
    scene.noise_power = 0.0;
    Target t = fx.on_beam(fx.beam(1, 1), 250.0, 5.0);
    t.arrival_az = -0.2;
    t.arrival_el = 0.3;
    scene.targets = {t};
    scene.ofdm.tx_power = 1e12;
    const cplx one{1.0, 0.0};
    Rng rng = make_stream(8, {});
    const auto frames = synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span(&one, 1), rng, {true});
    const auto a_rx = oracle::kron_steering(10, 10, t.arrival_az, t.arrival_el);
    const auto &fr = frames[5];
    REQUIRE(fr.tensor.size() == 100 * 240 * 4);
    for (std::size_t m : {0, 1, 37, 99})
        for (std::size_t n : {0, 100, 239})
            for (std::size_t l = 0; l < 4; ++l)
                CHECK(std::abs(fr.antenna_sample(m, n, l) - fr.samples(n, l) * a_rx[m]) <=
                      1e-12 * std::abs(fr.samples(n, l)) + 1e-30);

    // antenna 0 is unchanged by requesting the tensor, noise included
    Scene noisy = scene;
    noisy.noise_power = 1.0;
    Rng r1 = make_stream(9, {}), r2 = make_stream(9, {});
    const auto with = synthesize_rx_frames(noisy, fx.grid, fx.f, fx.full, std::span(&one, 1), r1, {true});
    const auto without = synthesize_rx_frames(noisy, fx.grid, fx.f, fx.full, std::span(&one, 1), r2);
    CHECK(with[3].samples == without[3].samples);
}

TEST_CASE("direct-link leakage knob")
{
    Fixture fx;
    Scene scene;
    scene.noise_power = 0.0;
    Rng r1 = make_stream(1, {});
    auto frames = synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span<const cplx>{}, r1);
    CHECK(frames[0].samples(0, 0) == cplx{});

    scene.direct_leakage = 0.1;
    Rng r2 = make_stream(1, {});
    frames = synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span<const cplx>{}, r2);
    CHECK(std::abs(frames[22].samples(10, 2)) > 0.0);
}

TEST_CASE("synthesis input validation")
{
    Fixture fx;
    Scene scene;
    scene.targets = {fx.on_beam(0, 10.0, 0.0)};
    Rng rng = make_stream(1, {});
    CHECK_THROWS_AS(synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span<const cplx>{}, rng), ConfigError);
    const cplx one{1, 0};
    CHECK_THROWS_AS(synthesize_rx_frames(scene, fx.grid, fx.f, SsbMask(10, 4, true), std::span(&one, 1), rng),
                    ConfigError);
    CMatrix wrong(100, 3);
    CHECK_THROWS_AS(synthesize_rx_frames(scene, fx.grid, wrong, fx.full, std::span(&one, 1), rng), ConfigError);
    scene.noise_power = -1.0;
    CHECK_THROWS_AS(synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span(&one, 1), rng), ConfigError);
    scene.noise_power = 1.0;
    scene.targets[0].rcs = 0.0;
    CHECK_THROWS_AS(synthesize_rx_frames(scene, fx.grid, fx.f, fx.full, std::span(&one, 1), rng), DomainError);
}

TEST_CASE("unambiguous range and velocity")
{
    OfdmFrameConfig cfg;
    const auto u = unambiguous_limits(cfg);
    CHECK(u.range == doctest::Approx(4996.54).epsilon(1e-5));
    CHECK(u.velocity == doctest::Approx(599.585).epsilon(1e-5));
    cfg.subcarrier_spacing *= 2;
    const auto u2 = unambiguous_limits(cfg);
    CHECK(u2.range == doctest::Approx(u.range / 2));
    CHECK(u2.velocity == doctest::Approx(u.velocity * 2));
}
