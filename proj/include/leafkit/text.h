// Copyright 2026 The leafkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEAFKIT_TEXT_H_
#define LEAFKIT_TEXT_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leafkit {

// Shortest-safe round-trip form: 17 significant digits, "inf"/"-inf"/"nan".
std::string format_double(double value);

// Strict parse of a whole token; throws ParseError on trailing garbage.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

std::string join_doubles(std::span<const double> values, char sep = ',');
std::vector<double> parse_doubles(std::string_view text, char sep = ',');

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace leafkit

#endif  // LEAFKIT_TEXT_H_
