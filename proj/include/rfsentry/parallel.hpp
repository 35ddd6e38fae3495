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

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>

namespace rfsentry {

// Caps the OpenMP worker count for every parallel kernel. jobs <= 0 restores
// the runtime default. Results never depend on this value.
void set_jobs(int jobs);
int max_jobs();

// Collects exceptions thrown inside an OpenMP loop body. Keeps the one with
// the lowest iteration index so the reported error does not depend on the
// schedule.
class FirstError {
 public:
  template <typename Fn>
  void run(std::size_t index, Fn&& fn) noexcept {
    try {
      fn();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!index_ || index < *index_) {
        index_ = index;
        error_ = std::current_exception();
      }
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::optional<std::size_t> index_;
  std::exception_ptr error_;
};

}  // namespace rfsentry
