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

// A reduced configuration that keeps Monte Carlo tests fast.
#ifndef SSBSENSE_TESTS_SMALL_SETUP_HPP
#define SSBSENSE_TESTS_SMALL_SETUP_HPP

#include "ssbsense/detector.hpp"

inline ssbsense::SweepSetup small_setup()
{
    ssbsense::OfdmFrameConfig ofdm;
    ofdm.n_subcarriers = 24;
    ofdm.n_symbols = 2;
    return ssbsense::SweepSetup::make(ofdm, {4, 4}, ssbsense::SsbMask::full(ofdm), {96, 32},
                                      ssbsense::PafStatistic::PeakOverRms, 6.0);
}

#endif
