// Copyright 2026 The rank2 Authors
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

#include "rank2/circuit.hpp"
#include "rank2/ensemble.hpp"
#include "rank2/entanglement.hpp"
#include "rank2/observables.hpp"
#include "rank2/pauli.hpp"
#include "rank2/protocol.hpp"
#include "rank2/rng.hpp"
#include "rank2/simulator.hpp"
