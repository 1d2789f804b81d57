// Copyright 2026 The darklab Authors
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

#include "darklab/analysis.hpp"
#include "darklab/errors.hpp"
#include "darklab/invariant.hpp"
#include "darklab/io.hpp"
#include "darklab/kernel.hpp"
#include "darklab/section5.hpp"
#include "darklab/simulate.hpp"
#include "darklab/subspace.hpp"
#include "darklab/symplectic.hpp"
#include "darklab/synthesis.hpp"
#include "darklab/system.hpp"
