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

#ifndef SSBSENSE_TYPES_HPP
#define SSBSENSE_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssbsense
{
    using cplx = std::complex<double>;

    inline constexpr double kSpeedOfLight = 2.99792458e8; // m/s
    inline constexpr double kPi = std::numbers::pi;

    /// Thrown when a configuration is inconsistent or unsupported (bad dimensions, wrong sizes).
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Thrown when a numeric argument lies outside the domain of the model.
    class DomainError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    /// Dense row-major matrix. Element (r, c) lives at data[r * cols + c].
    template <typename T>
    class Matrix
    {
    public:
        Matrix() = default;
        Matrix(std::size_t rows, std::size_t cols, T fill = T{})
            : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }
        std::size_t size() const noexcept { return data_.size(); }
        bool empty() const noexcept { return data_.empty(); }

        T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
        std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

        std::span<T> flat() noexcept { return data_; }
        std::span<const T> flat() const noexcept { return data_; }
        T *data() noexcept { return data_.data(); }
        const T *data() const noexcept { return data_.data(); }

        bool operator==(const Matrix &) const = default;

    private:
        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        std::vector<T> data_;
    };

    using CMatrix = Matrix<cplx>;
    using RMatrix = Matrix<double>;

    inline double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / kPi; }
    inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
    inline double lin2db(double lin) { return 10.0 * std::log10(lin); }
}

#endif
