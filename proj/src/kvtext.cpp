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

#include "dsaudit/kvtext.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "dsaudit/errors.hpp"

namespace dsaudit {

ParseError::ParseError(Kind kind, int line, int column, std::string message,
                       std::string invariant)
    : Error([&] {
        const char* label = kind == Kind::syntax        ? "syntax error"
                            : kind == Kind::unknown_key ? "unknown key"
                                                        : "constraint violation";
        std::string where = line > 0 ? fmt::format("{}:{}: ", line, column) : "";
        std::string inv = invariant.empty() ? "" : fmt::format(" [{}]", invariant);
        return fmt::format("{}{}: {}{}", where, label, message, inv);
      }()),
      kind_(kind),
      line_(line),
      column_(column),
      invariant_(std::move(invariant)) {}

namespace kvtext {
namespace {

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void syntax(int line, int column, std::string message) {
  throw ParseError(ParseError::Kind::syntax, line, column, std::move(message));
}

}  // namespace

Document parse(std::string_view text) {
  Document doc;
  Block* current = &doc.top;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

    std::size_t i = 0;
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    if (i == raw.size()) {
      if (eol == text.size()) break;
      continue;
    }
    const int col0 = static_cast<int>(i) + 1;

    if (raw[i] == '[') {
      std::size_t close = raw.find(']', i);
      if (close == std::string_view::npos) syntax(line_no, static_cast<int>(raw.size()) + 1, "expected ']'");
      std::string_view name = trim(raw.substr(i + 1, close - i - 1));
      if (name.empty() || !std::all_of(name.begin(), name.end(), is_key_char))
        syntax(line_no, col0 + 1, "invalid block name");
      if (!trim(raw.substr(close + 1)).empty())
        syntax(line_no, static_cast<int>(close) + 2, "unexpected text after block header");
      doc.blocks.push_back(Block{std::string(name), line_no, {}});
      current = &doc.blocks.back();
      if (eol == text.size()) break;
      continue;
    }

    std::size_t k = i;
    while (k < raw.size() && is_key_char(raw[k])) ++k;
    if (k == i) syntax(line_no, col0, "expected key");
    std::size_t j = k;
    while (j < raw.size() && (raw[j] == ' ' || raw[j] == '\t')) ++j;
    if (j >= raw.size() || raw[j] != '=') syntax(line_no, static_cast<int>(j) + 1, "expected '='");

    Entry entry;
    entry.key = std::string(raw.substr(i, k - i));
    entry.line = line_no;
    entry.key_column = col0;
    std::size_t v = j + 1;
    while (v < raw.size() && std::isspace(static_cast<unsigned char>(raw[v]))) ++v;
    entry.value_column = static_cast<int>(v) + 1;
    entry.value = std::string(trim(raw.substr(std::min(v, raw.size()))));

    for (const auto& prior : current->entries) {
      if (prior.key == entry.key)
        syntax(line_no, col0, fmt::format("duplicate key '{}' (first set on line {})", entry.key, prior.line));
    }
    current->entries.push_back(std::move(entry));
    if (eol == text.size()) break;
  }
  return doc;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = value.find(',', start);
    std::string_view part = value.substr(start, comma == std::string_view::npos ? value.npos : comma - start);
    out.emplace_back(trim(part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_list(std::span<const std::string> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i];
  }
  return out;
}

void fail_value(const Entry& e, std::string_view what) {
  throw ParseError(ParseError::Kind::syntax, e.line, e.value_column,
                   fmt::format("'{}': expected {}, got '{}'", e.key, what, e.value));
}

std::int64_t to_int(const Entry& e) {
  std::int64_t out = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || e.value.empty()) fail_value(e, "integer");
  return out;
}

std::uint64_t to_uint64(const Entry& e) {
  std::uint64_t out = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || e.value.empty()) fail_value(e, "unsigned 64-bit integer");
  return out;
}

double to_real(const Entry& e) {
  double out = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || e.value.empty() || !std::isfinite(out)) fail_value(e, "real number");
  return out;
}

bool to_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail_value(e, "true or false");
}

std::string format_real(double value) { return fmt::format("{}", value); }

BlockReader::BlockReader(const Block& block) : block_(block), used_(block.entries.size(), false) {}

const Entry* BlockReader::take(std::string_view key) {
  for (std::size_t i = 0; i < block_.entries.size(); ++i) {
    if (block_.entries[i].key == key) {
      used_[i] = true;
      return &block_.entries[i];
    }
  }
  return nullptr;
}

bool BlockReader::has(std::string_view key) const {
  return std::any_of(block_.entries.begin(), block_.entries.end(),
                     [&](const Entry& e) { return e.key == key; });
}

std::string BlockReader::get_string(std::string_view key, std::string fallback) {
  if (const Entry* e = take(key)) return e->value;
  return fallback;
}

std::int64_t BlockReader::get_int(std::string_view key, std::int64_t fallback) {
  if (const Entry* e = take(key)) return to_int(*e);
  return fallback;
}

std::uint64_t BlockReader::get_uint64(std::string_view key, std::uint64_t fallback) {
  if (const Entry* e = take(key)) return to_uint64(*e);
  return fallback;
}

double BlockReader::get_real(std::string_view key, double fallback) {
  if (const Entry* e = take(key)) return to_real(*e);
  return fallback;
}

bool BlockReader::get_bool(std::string_view key, bool fallback) {
  if (const Entry* e = take(key)) return to_bool(*e);
  return fallback;
}

std::vector<std::string> BlockReader::get_list(std::string_view key, std::vector<std::string> fallback) {
  if (const Entry* e = take(key)) {
    auto items = split_list(e->value);
    for (const auto& item : items)
      if (item.empty()) fail_value(*e, "comma-separated list without empty items");
    return items;
  }
  return fallback;
}

void BlockReader::finish() const {
  for (std::size_t i = 0; i < block_.entries.size(); ++i) {
    if (!used_[i]) {
      const Entry& e = block_.entries[i];
      std::string where = block_.name.empty() ? "" : fmt::format(" in [{}] block", block_.name);
      throw ParseError(ParseError::Kind::unknown_key, e.line, e.key_column,
                       fmt::format("'{}'{}", e.key, where));
    }
  }
}

}  // namespace kvtext
}  // namespace dsaudit
