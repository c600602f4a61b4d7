// Copyright 2026 The FairProbe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "fairprobe/allocation.hpp"
#include "fairprobe/distribution.hpp"
#include "fairprobe/errors.hpp"
#include "fairprobe/experiment.hpp"
#include "fairprobe/matrix.hpp"
#include "fairprobe/model.hpp"
#include "fairprobe/nsw_oracle.hpp"
#include "fairprobe/nsw_solver.hpp"
#include "fairprobe/online.hpp"
#include "fairprobe/piecewise_log.hpp"
#include "fairprobe/probing.hpp"
#include "fairprobe/rng.hpp"
#include "fairprobe/taxi.hpp"
