// Copyright 2026 The RF Sentry Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rfsentry/parallel.hpp"

#include <omp.h>

namespace rfsentry {

namespace {
const int kDefaultThreads = omp_get_max_threads();
}

void set_jobs(int jobs) { omp_set_num_threads(jobs > 0 ? jobs : kDefaultThreads); }

int max_jobs() { return omp_get_max_threads(); }

}  // namespace rfsentry
