// Copyright 2026 The ismd Authors
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

// Umbrella header.

#ifndef ISMD_ISMD_HPP_
#define ISMD_ISMD_HPP_

#include "ismd/baselines.hpp"
#include "ismd/cuts.hpp"
#include "ismd/error.hpp"
#include "ismd/experiments.hpp"
#include "ismd/geometry.hpp"
#include "ismd/instance.hpp"
#include "ismd/lp.hpp"
#include "ismd/mirror_descent.hpp"
#include "ismd/numkit.hpp"
#include "ismd/second_stage.hpp"
#include "ismd/strong_concavity.hpp"

#endif  // ISMD_ISMD_HPP_
