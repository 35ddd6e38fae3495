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

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rfsentry/evaluation.hpp"

namespace rfsentry::report {

using Json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v);

Json to_json(const gbdt::TrainConfig& config);
Json to_json(const FeatureConfig& config);
Json to_json(const eval::MetricSet& metrics);
Json to_json(const eval::CvReport& report);
Json to_json(const eval::TTestResult& result);
Json to_json(const eval::BandComparison& comparison);

// Long-format plot table: case,band,fold,metric,value.
std::string cv_csv(const eval::CvReport& report, LabelCase label_case, BandMode band);
std::string comparison_csv(const eval::BandComparison& comparison);

}  // namespace rfsentry::report
