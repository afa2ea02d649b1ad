// SPDX-License-Identifier: Apache-2.0
//
// beamspace-sd: beamspace channel estimation for lens-array mmWave massive MIMO
// Copyright (C) 2026 The beamspace-sd authors
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

#include "beamspace/channel.hpp"
#include "beamspace/config.hpp"
#include "beamspace/downlink.hpp"
#include "beamspace/errors.hpp"
#include "beamspace/estimation.hpp"
#include "beamspace/harness.hpp"
#include "beamspace/numerics.hpp"
#include "beamspace/random.hpp"
#include "beamspace/sounding.hpp"
#include "beamspace/validation.hpp"
