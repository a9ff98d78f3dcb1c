// Copyright 2026 The qee Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "qee/adversaries.hpp"
#include "qee/adversary.hpp"
#include "qee/analysis.hpp"
#include "qee/channels.hpp"
#include "qee/game.hpp"
#include "qee/harness.hpp"
#include "qee/linalg.hpp"
#include "qee/protocol.hpp"
#include "qee/qsdc.hpp"
#include "qee/quantum_system.hpp"
#include "qee/rng.hpp"
#include "qee/selftest.hpp"
#include "qee/state_vector.hpp"
#include "qee/types.hpp"
