// SPDX-License-Identifier: Apache-2.0
//
// oobrad - spatial out-of-band radiation analysis for multi-antenna transmitters
// Copyright (C) 2026 The oobrad authors
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

#ifndef OOBRAD_ERROR_HPP
#define OOBRAD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace oobrad
{
    // Invalid numeric parameter (roll-off, oversampling, orders, ...)
    class ParameterError : public std::invalid_argument
    {
    public:
        explicit ParameterError(const std::string &what) : std::invalid_argument(what) {}
    };

    // Inconsistent sizes, grids or lag spacings between arguments
    class DimensionError : public std::invalid_argument
    {
    public:
        explicit DimensionError(const std::string &what) : std::invalid_argument(what) {}
    };

    // A computation that is well-posed in general but not for this input
    // (zero channel, no compression point, broken PSD, ...)
    class NumericalError : public std::runtime_error
    {
    public:
        explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
    };

    // Malformed or inconsistent scenario configuration
    class ConfigError : public std::runtime_error
    {
    public:
        explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
    };

    // Output files that cannot be created or written
    class IoError : public std::runtime_error
    {
    public:
        explicit IoError(const std::string &what) : std::runtime_error(what) {}
    };
}

#endif
