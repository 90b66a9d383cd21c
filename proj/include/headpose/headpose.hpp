// Copyright 2026 The headpose Authors.
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

#ifndef HEADPOSE_HEADPOSE_HPP_
#define HEADPOSE_HEADPOSE_HPP_

#include "headpose/alignment.hpp"
#include "headpose/errors.hpp"
#include "headpose/eval.hpp"
#include "headpose/io.hpp"
#include "headpose/metrics.hpp"
#include "headpose/opal.hpp"
#include "headpose/so3.hpp"
#include "headpose/version.hpp"

#endif  // HEADPOSE_HEADPOSE_HPP_
