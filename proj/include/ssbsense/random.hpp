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

#ifndef SSBSENSE_RANDOM_HPP
#define SSBSENSE_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

#include "ssbsense/types.hpp"

namespace ssbsense
{
    using Rng = std::mt19937_64;

    /// Stream identifiers used when deriving substreams, so different uses of a
    /// trial never share random numbers.
    enum class Stream : std::uint64_t
    {
        Scene = 1,
        Amplitude = 2,
        Noise = 3,
        NoiseOnly = 4,
        Deactivation = 5,
        Angles = 6,
    };

    /// SplitMix64 finalizer.
    std::uint64_t splitmix64(std::uint64_t x) noexcept;

    /// Derive a generator from a root seed and a path of identifiers (experiment
    /// point, trial index, stream). Results depend only on the inputs, never on
    /// scheduling.
    Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    inline std::uint64_t id(Stream s) { return static_cast<std::uint64_t>(s); }

    /// Circularly-symmetric complex Gaussian CN(0, variance).
    class ComplexGaussian
    {
    public:
        explicit ComplexGaussian(double variance = 1.0)
            : dist_(0.0, std::sqrt(variance / 2.0)) {}

        cplx operator()(Rng &rng) { return {dist_(rng), dist_(rng)}; }

    private:
        std::normal_distribution<double> dist_;
    };
}

#endif
