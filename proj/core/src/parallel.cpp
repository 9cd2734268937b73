// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The a2gmap Authors
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

#include "a2gmap/parallel.hpp"

namespace a2gmap {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_max_threads(unsigned n) noexcept { g_threads = n == 0 ? 1 : n; }

unsigned max_threads() noexcept { return g_threads; }

}  // namespace a2gmap
