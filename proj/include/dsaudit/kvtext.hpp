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

// Line-oriented key/value text shared by .plan, .platform and .grid files.
//
//   # comment
//   key = value
//   dotted.key = a, b, c
//
//   [block]          starts a repeated block; following keys belong to it
//   key = value
//
// Keys are [A-Za-z0-9_.]+. Values run to end of line (or a '#'), trimmed.
// Lists are comma separated. A key may appear at most once per block.

#ifndef DSAUDIT_KVTEXT_HPP_
#define DSAUDIT_KVTEXT_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsaudit::kvtext {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  int key_column = 0;
  int value_column = 0;
};

struct Block {
  std::string name;  // empty for the top-level block
  int line = 0;
  std::vector<Entry> entries;
};

struct Document {
  Block top;
  std::vector<Block> blocks;
};

// Throws ParseError(syntax) with the offending line and column.
Document parse(std::string_view text);

std::vector<std::string> split_list(std::string_view value);
std::string join_list(std::span<const std::string> values);

// Typed, consumption-tracking access to one block. Every typed getter throws
// ParseError(syntax) positioned at the value when conversion fails; finish()
// throws ParseError(unknown_key) for entries nobody asked for.
class BlockReader {
 public:
  explicit BlockReader(const Block& block);

  const Entry* take(std::string_view key);
  bool has(std::string_view key) const;

  std::string get_string(std::string_view key, std::string fallback);
  std::int64_t get_int(std::string_view key, std::int64_t fallback);
  std::uint64_t get_uint64(std::string_view key, std::uint64_t fallback);
  double get_real(std::string_view key, double fallback);
  bool get_bool(std::string_view key, bool fallback);
  std::vector<std::string> get_list(std::string_view key, std::vector<std::string> fallback);

  void finish() const;

 private:
  const Block& block_;
  std::vector<bool> used_;
};

std::int64_t to_int(const Entry& e);
std::uint64_t to_uint64(const Entry& e);
double to_real(const Entry& e);
bool to_bool(const Entry& e);

// Reals are written with up to 17 significant digits so that they reparse
// to the same double.
std::string format_real(double value);

[[noreturn]] void fail_value(const Entry& e, std::string_view what);

}  // namespace dsaudit::kvtext

#endif  // DSAUDIT_KVTEXT_HPP_
