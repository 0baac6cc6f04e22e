// mnmix/mnmix.hpp

// Copyright 2026  The mnmix authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//  http://www.apache.org/licenses/LICENSE-2.0

// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "mnmix/errors.hpp"
#include "mnmix/flip_flop.hpp"
#include "mnmix/generators.hpp"
#include "mnmix/io.hpp"
#include "mnmix/kmeans.hpp"
#include "mnmix/matrix_normal.hpp"
#include "mnmix/metrics.hpp"
#include "mnmix/mixture.hpp"
#include "mnmix/model_selection.hpp"
#include "mnmix/parallel.hpp"
#include "mnmix/random.hpp"
