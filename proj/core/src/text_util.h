// Copyright 2026 The dpdecode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small std::string_view helpers. The system absl predates C++17 and its
// string_view is a distinct type, so its split/parse utilities are avoided.

#ifndef DPDECODE_SRC_TEXT_UTIL_H_
#define DPDECODE_SRC_TEXT_UTIL_H_

#include <charconv>
#include <string_view>
#include <system_error>
#include <vector>

namespace dpdecode::internal {

// Splits on any of `delims`, dropping empty pieces when `skip_empty`.
inline std::vector<std::string_view> Split(std::string_view text,
                                           std::string_view delims,
                                           bool skip_empty) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = text.find_first_of(delims, begin);
    std::string_view piece = text.substr(
        begin, end == std::string_view::npos ? std::string_view::npos
                                             : end - begin);
    if (!skip_empty || !piece.empty()) out.push_back(piece);
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

inline std::string_view StripWhitespace(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\v\f";
  const std::size_t b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(kSpace) - b + 1);
}

// Whole-string numeric parse; false on any trailing characters.
template <typename T>
bool ParseNumber(std::string_view s, T* out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace dpdecode::internal

#endif  // DPDECODE_SRC_TEXT_UTIL_H_
