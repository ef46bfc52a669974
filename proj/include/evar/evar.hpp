// Copyright 2026 The evar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVAR_EVAR_HPP_
#define EVAR_EVAR_HPP_

#include "evar/core.hpp"
#include "evar/quadrature.hpp"
#include "evar/numeric.hpp"
#include "evar/distribution.hpp"
#include "evar/ldp.hpp"
#include "evar/constraints.hpp"
#include "evar/composite.hpp"
#include "evar/counterexample.hpp"
#include "evar/oracle.hpp"
#include "evar/io.hpp"

#endif  // EVAR_EVAR_HPP_
