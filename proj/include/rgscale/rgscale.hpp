// Copyright (c) 2026 The rgscale developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "rgscale/classifier.hpp"
#include "rgscale/common.hpp"
#include "rgscale/exponents.hpp"
#include "rgscale/families.hpp"
#include "rgscale/io.hpp"
#include "rgscale/kernel.hpp"
#include "rgscale/parallel.hpp"
#include "rgscale/partitions.hpp"
#include "rgscale/qmc.hpp"
#include "rgscale/quadrature.hpp"
#include "rgscale/quantum.hpp"
#include "rgscale/scaling.hpp"
#include "rgscale/svg.hpp"
