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

#include "ratrain/channel.hpp"
#include "ratrain/config.hpp"
#include "ratrain/errors.hpp"
#include "ratrain/estimation.hpp"
#include "ratrain/harness.hpp"
#include "ratrain/numerics.hpp"
#include "ratrain/optimizer.hpp"
#include "ratrain/random.hpp"
#include "ratrain/report_io.hpp"
#include "ratrain/signal.hpp"
