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

#ifndef DPDECODE_FORMAT_H_
#define DPDECODE_FORMAT_H_

#include <string>

namespace dpdecode {

// printf "%.<digits>g"; infinities print as "inf".
std::string FormatSignificant(double value, int digits);

}  // namespace dpdecode

#endif  // DPDECODE_FORMAT_H_
