// Copyright 2026 The metaphor-forge Authors.
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

#ifndef MF_MF_HPP_
#define MF_MF_HPP_

#include "mf/common.hpp"
#include "mf/config.hpp"
#include "mf/conllu.hpp"
#include "mf/engine.hpp"
#include "mf/extraction.hpp"
#include "mf/generalization.hpp"
#include "mf/lm_finder.hpp"
#include "mf/pipeline.hpp"
#include "mf/store.hpp"
#include "mf/taxonomy.hpp"
#include "mf/topics.hpp"

#endif  // MF_MF_HPP_
