//
// Copyright 2026 The CSDP Authors
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
//

#ifndef CSDP_CSDP_HPP
#define CSDP_CSDP_HPP

#include "csdp/error.hpp"
#include "csdp/random.hpp"
#include "csdp/parallel.hpp"
#include "csdp/cmc.hpp"
#include "csdp/joint.hpp"
#include "csdp/query.hpp"
#include "csdp/leakage.hpp"
#include "csdp/oracle.hpp"
#include "csdp/reductions.hpp"
#include "csdp/fran.hpp"
#include "csdp/utility.hpp"
#include "csdp/stats.hpp"
#include "csdp/io.hpp"
#include "csdp/experiment.hpp"
#include "csdp/acceptance.hpp"

#endif  // CSDP_CSDP_HPP
