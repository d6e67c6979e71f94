/*
 * Copyright 2026 The ldpembed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ldpembed/propagation.hpp"

namespace ldpembed {

int SeriesTermsFor(double alpha, double tolerance) {
  if (!(alpha > 0 && alpha < 1)) throw InputError("alpha must lie in (0, 1)");
  if (!(tolerance > 0 && tolerance < 1)) throw InputError("tolerance must lie in (0, 1)");
  // (1 - alpha)^t < tol  <=>  t > log(tol) / log(1 - alpha)
  int t = static_cast<int>(std::floor(std::log(tolerance) / std::log1p(-alpha))) + 1;
  while (std::pow(1.0 - alpha, t) >= tolerance) ++t;
  return std::max(t, 1);
}

}  // namespace ldpembed
