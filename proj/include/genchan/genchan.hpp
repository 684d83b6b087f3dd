// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
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

#ifndef GENCHAN_GENCHAN_HPP
#define GENCHAN_GENCHAN_HPP

#include "genchan/analysis.hpp"
#include "genchan/common.hpp"
#include "genchan/compression.hpp"
#include "genchan/datasets.hpp"
#include "genchan/dictionary.hpp"
#include "genchan/generative.hpp"
#include "genchan/metrics.hpp"
#include "genchan/model_io.hpp"
#include "genchan/neural.hpp"
#include "genchan/pbgc.hpp"
#include "genchan/rng.hpp"

#endif
