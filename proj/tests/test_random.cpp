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

#include <set>

#include "doctest.h"
#include "ssbsense/random.hpp"

using namespace ssbsense;

TEST_CASE("substreams are reproducible and distinct")
{
    Rng a = make_stream(12345, {3, id(Stream::Noise)});
    Rng b = make_stream(12345, {3, id(Stream::Noise)});
    CHECK(a() == b());

    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL})
        for (std::uint64_t i = 0; i < 50; ++i)
            for (Stream s : {Stream::Scene, Stream::Amplitude, Stream::Noise, Stream::NoiseOnly, Stream::Deactivation})
            {
                Rng r = make_stream(seed, {i, id(s)});
                firsts.insert(r());
            }
    CHECK(firsts.size() == 3 * 50 * 5);

    // path order matters
    Rng x = make_stream(1, {2, 3}), y = make_stream(1, {3, 2});
    CHECK(x() != y());
    Rng e = make_stream(1, {}), z = make_stream(1, {0});
    CHECK(e() != z());
}

TEST_CASE("splitmix64 reference values")
{
    // first outputs of the SplitMix64 generator seeded with 0
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("complex Gaussian variance")
{
    Rng rng = make_stream(8, {});
    ComplexGaussian g(4.0);
    double acc = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
        acc += std::norm(g(rng));
    CHECK(acc / n == doctest::Approx(4.0).epsilon(0.01));
}
