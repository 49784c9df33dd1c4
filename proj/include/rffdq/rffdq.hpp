// Copyright 2026 The rffdq Authors
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

#include "rffdq/circuit_io.hpp"
#include "rffdq/config.hpp"
#include "rffdq/dataset.hpp"
#include "rffdq/dequant.hpp"
#include "rffdq/errors.hpp"
#include "rffdq/harness.hpp"
#include "rffdq/learners.hpp"
#include "rffdq/qsim.hpp"
#include "rffdq/random.hpp"
#include "rffdq/rff.hpp"
#include "rffdq/spectrum.hpp"
#include "rffdq/spectrum_io.hpp"
