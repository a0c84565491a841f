// Copyright 2026 The mbftqc Authors
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

#ifndef MBFTQC_MBFTQC_H
#define MBFTQC_MBFTQC_H

#include "mbftqc/circuit.h"
#include "mbftqc/css_codes.h"
#include "mbftqc/errors.h"
#include "mbftqc/estimator.h"
#include "mbftqc/experiments.h"
#include "mbftqc/frame_sampler.h"
#include "mbftqc/gadgets.h"
#include "mbftqc/gate.h"
#include "mbftqc/pauli.h"
#include "mbftqc/tableau.h"

#endif
