// Copyright 2026 The dsaudit Authors.
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

#ifndef DSAUDIT_DIGEST_HPP_
#define DSAUDIT_DIGEST_HPP_

#include <string>
#include <string_view>

#include "json.hpp"

namespace dsaudit {

// Canonical byte form of a JSON value: object keys sorted, no whitespace,
// integers in plain decimal, reals as printf("%.9g"), strings JSON-escaped.
// Two implementations that follow these rules produce identical bytes.
std::string canonical_json(const nlohmann::json& value);

// Lowercase hex SHA-256 of the given bytes.
std::string config_hash(std::string_view bytes);

inline std::string canonical_hash(const nlohmann::json& value) {
  return config_hash(canonical_json(value));
}

}  // namespace dsaudit

#endif  // DSAUDIT_DIGEST_HPP_
