/*
 * Copyright 2026 The hevfl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hevfl/matmult/types.hpp"

#include "hevfl/error.hpp"

namespace hevfl::matmult {

std::string to_string(Method m) {
  switch (m) {
    case Method::kNaive:
      return "naive";
    case Method::kColumn:
      return "column";
    case Method::kGalaDiagonal:
      return "gala-diagonal";
    case Method::kPackVflDiagonal:
      return "packvfl-diagonal";
    case Method::kGala:
      return "gala";
    case Method::kPackVfl:
      return "packvfl";
    case Method::kCheetah:
      return "cheetah";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kConfigInvalid, "unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::kNaive, Method::kColumn,  Method::kGalaDiagonal,
                                           Method::kPackVflDiagonal, Method::kGala, Method::kPackVfl,
                                           Method::kCheetah};
  return methods;
}

std::string to_string(PartitionCase c) {
  switch (c) {
    case PartitionCase::kTall:
      return "m>N'>=n";
    case PartitionCase::kWide:
      return "m<=N'<n";
    case PartitionCase::kGrid:
      return "m,n>N'";
  }
  return "unknown";
}

}  // namespace hevfl::matmult
