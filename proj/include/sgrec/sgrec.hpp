// Copyright 2026 The sgrec Authors
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

#include "sgrec/adiabatic.hpp"
#include "sgrec/circuit.hpp"
#include "sgrec/config.hpp"
#include "sgrec/density_state.hpp"
#include "sgrec/errors.hpp"
#include "sgrec/grec.hpp"
#include "sgrec/metrics.hpp"
#include "sgrec/parallel.hpp"
#include "sgrec/pauli.hpp"
#include "sgrec/pipeline.hpp"
#include "sgrec/report.hpp"
#include "sgrec/rng.hpp"
#include "sgrec/schwinger.hpp"
#include "sgrec/spectrum.hpp"
#include "sgrec/zne.hpp"
