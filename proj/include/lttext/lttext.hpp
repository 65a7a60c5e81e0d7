// Copyright 2026 The lttext Authors
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

#include "lttext/annotation.hpp"
#include "lttext/benchmark.hpp"
#include "lttext/error.hpp"
#include "lttext/eval.hpp"
#include "lttext/formats.hpp"
#include "lttext/geometry.hpp"
#include "lttext/image.hpp"
#include "lttext/image_io.hpp"
#include "lttext/jdl.hpp"
#include "lttext/parallel.hpp"
#include "lttext/plan_io.hpp"
#include "lttext/recon_loss.hpp"
#include "lttext/report.hpp"
#include "lttext/text.hpp"
