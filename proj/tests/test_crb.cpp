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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ssbsense/crb.hpp"

using namespace ssbsense;

TEST_CASE("closed-form bound is the inverse of the Fisher information")
{
    double worst = 0.0;
    for (std::size_t n = 2; n <= 16; ++n)
        for (std::size_t l = 2; l <= 16; ++l)
            for (double snr : {0.1, 1.0, 10.0})
            {
                const CrbInputs in{n, l, 60e3, 15e9, snr};
                const Mat2 f = fim(in);
                CHECK(f[0][1] == f[1][0]);
                CHECK(f[0][0] * f[1][1] - f[0][1] * f[1][0] > 0.0);
                const Mat2 inv = oracle::inverse2(f);
                const CrbResult r = crb_closed_form(in);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        worst = std::max(worst, oracle::rel(r.crb[i][j], inv[i][j]));
                CHECK(r.var_d == r.crb[0][0]);
                CHECK(r.var_v == r.crb[1][1]);
                CHECK(r.var_d > 0.0);
                CHECK(r.var_v > 0.0);
            }
    MESSAGE("max relative deviation " << worst);
    CHECK(worst <= 1e-10);
}

TEST_CASE("Fisher information matches a finite-difference oracle")
{
    for (auto [n, l] : {std::pair<std::size_t, std::size_t>{240, 4}, {16, 8}, {3, 2}})
    {
        const Mat2 f = fim({n, l, 60e3, 15e9, 1.0});
        const Mat2 ref = oracle::finite_difference_fim(n, l, 60e3, 15e9, 1.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(oracle::rel(f[i][j], ref[i][j]) <= 1e-6);
    }
}

TEST_CASE("Fisher information scales linearly with SNR")
{
    const Mat2 zero = fim({240, 4, 60e3, 15e9, 0.0});
    for (const auto &row : zero)
        for (double x : row)
            CHECK(x == 0.0);
    const Mat2 a = fim({240, 4, 60e3, 15e9, 0.7});
    const Mat2 b = fim({240, 4, 60e3, 15e9, 1.4});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(b[i][j] == doctest::Approx(2 * a[i][j]).epsilon(1e-14));
}

TEST_CASE("reference operating point")
{
    const CrbResult r = crb_closed_form({240, 4, 60e3, 15e9, 1.0});
    CHECK(r.var_d == doctest::Approx(4.6e-2).epsilon(0.02));
    CHECK(std::sqrt(r.var_d) == doctest::Approx(0.21).epsilon(0.03));

    // independent evaluation of the scalar range and velocity expressions
    const double ts = 1 / 60e3, c = oracle::c0, lambda = c / 15e9, n = 240, l = 4, pi2 = oracle::pi * oracle::pi;
    const double den = 7 * n * l - n - l - 5;
    CHECK(r.var_d == doctest::Approx(3 * ts * ts * c * c * (2 * l + 1) / (pi2 * n * l * den * (n + 1))).epsilon(1e-13));
    CHECK(r.var_v ==
          doctest::Approx(3 * lambda * lambda * 60e3 * 60e3 * (2 * n + 1) / (4 * pi2 * n * l * den * (l + 1))).epsilon(1e-13));

    const CrbResult twice = crb_closed_form({240, 4, 60e3, 15e9, 2.0});
    CHECK(twice.var_d == doctest::Approx(r.var_d / 2).epsilon(1e-14));
    CHECK(twice.var_v == doctest::Approx(r.var_v / 2).epsilon(1e-14));
}

TEST_CASE("degenerate inputs")
{
    CHECK_THROWS_AS(crb_closed_form({1, 1, 60e3, 15e9, 1.0}), DomainError);
    CHECK_THROWS_AS(crb_closed_form({240, 4, 60e3, 15e9, 0.0}), DomainError);
    CHECK_THROWS_AS(fim({0, 4, 60e3, 15e9, 1.0}), DomainError);
    CHECK_THROWS_AS(fim({240, 4, -1.0, 15e9, 1.0}), DomainError);
    CHECK(CrbInputs{2, 1, 60e3, 15e9, 1.0}.determinant_factor() == 14 - 2 - 1 - 5);
}

TEST_CASE("bound curves")
{
    const std::vector<std::pair<std::size_t, std::size_t>> blocks{{240, 4}, {480, 4}, {240, 8}};
    const std::vector<double> snr{-20, -15, -10, -5, 0, 5, 10};
    const auto rows = crb_curves(blocks, snr, 60e3, 15e9);
    REQUIRE(rows.size() == blocks.size() * snr.size());

    auto at = [&](std::size_t b, std::size_t s) { return rows[b * snr.size() + s]; };
    for (std::size_t s = 0; s < snr.size(); ++s)
    {
        CHECK(at(1, s).rmse_d < at(0, s).rmse_d);
        CHECK(at(1, s).rmse_v < at(0, s).rmse_v);
        CHECK(at(2, s).rmse_d < at(0, s).rmse_d);
        CHECK(at(2, s).rmse_v < at(0, s).rmse_v);
        if (s > 0)
            for (std::size_t b = 0; b < blocks.size(); ++b)
            {
                CHECK(at(b, s).rmse_d < at(b, s - 1).rmse_d);
                const double slope = std::log10(at(b, s).rmse_d / at(b, s - 1).rmse_d) / ((snr[s] - snr[s - 1]) / 10);
                CHECK(slope == doctest::Approx(-0.5).epsilon(1e-9));
            }
    }

    // monotone in N and L over a wider grid
    for (std::size_t n = 8; n <= 512; n *= 2)
        for (std::size_t l = 2; l <= 32; l *= 2)
        {
            const auto base = crb_closed_form({n, l, 60e3, 15e9, 1.0});
            const auto more_n = crb_closed_form({n + 1, l, 60e3, 15e9, 1.0});
            const auto more_l = crb_closed_form({n, l + 1, 60e3, 15e9, 1.0});
            CHECK(more_n.var_d < base.var_d);
            CHECK(more_n.var_v < base.var_v);
            CHECK(more_l.var_d < base.var_d);
            CHECK(more_l.var_v < base.var_v);
        }
}

TEST_CASE("receive SNR conversions")
{
    const double snr = receive_snr(2.0, 1e-16, 80.0, 4e-13, 100);
    CHECK(snr == doctest::Approx(2.0 * 1e-16 * 6400 / (4e-13 * 100)));
    CHECK(tx_power_for_snr(snr, 1e-16, 80.0, 4e-13, 100) == doctest::Approx(2.0));
}
