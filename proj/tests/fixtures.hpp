// Copyright 2026 The sgrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Random inputs shared by the unit tests and the acceptance run.

#pragma once

#include <random>
#include <string>

#include "oracles.hpp"
#include "sgrec/density_state.hpp"
#include "sgrec/pauli.hpp"

namespace fixture {

inline sgrec::PauliSum random_sum(std::mt19937_64& gen, int n, int n_terms) {
  std::uniform_int_distribution<int> axis(0, 3);
  std::normal_distribution<double> coef;
  sgrec::PauliSum s(n);
  for (int t = 0; t < n_terms; ++t) {
    std::string label;
    for (int k = 0; k < n; ++k) label += "IXYZ"[axis(gen)];
    s.add(sgrec::PauliString::parse(label, coef(gen)));
  }
  return sgrec::canonicalize(s);
}

inline sgrec::StateVector random_pure(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> g;
  sgrec::StateVector v(static_cast<Eigen::Index>(1) << n);
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = sgrec::Complex(g(gen), g(gen));
  return v.normalized();
}

/// prod_j exp(-i dt c_j P_j) in term order, built from dense Kronecker strings.
inline oracle::Mat term_product(const sgrec::PauliSum& s, double dt) {
  const auto dim = static_cast<Eigen::Index>(1) << s.n_sites();
  oracle::Mat u = oracle::Mat::Identity(dim, dim);
  for (const auto& t : s.terms()) u = oracle::expm_minus_i(t.coefficient * oracle::kron_label(t.label()), dt) * u;
  return u;
}

}  // namespace fixture
