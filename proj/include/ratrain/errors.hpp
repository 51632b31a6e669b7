// SPDX-License-Identifier: Apache-2.0
//
// ratrain: channel estimation and orientation design for rotatable-antenna arrays
// Copyright (C) 2026 The ratrain authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace ratrain
{

// Shapes of operands do not agree.
class dimension_error : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of an operation.
class domain_error : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

// Normal equations too ill-conditioned to solve.
class singularity_error : public std::runtime_error
{
  public:
    singularity_error(const std::string &what, double ratio)
        : std::runtime_error(what), conditioning_ratio(ratio) {}

    double conditioning_ratio;
};

// Scenario or call parameters are inconsistent.
class config_error : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace ratrain
