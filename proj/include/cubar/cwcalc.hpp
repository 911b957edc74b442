#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubar/gridmodel.hpp"
#include "json.hpp"
#include "cubar/modalg.hpp"

namespace cubar {

// Integral singular homology of a finite CW pair, by degree; missing degrees are 0.
struct CWHomologyInput {
  std::vector<Presentation> integral_H;

  static CWHomologyInput from_json(const nlohmann::ordered_json& j);
  const Presentation& at(int k) const;
  int top() const { return static_cast<int>(integral_H.size()) - 1; }
};

struct CWPrediction {
  Presentation group = Presentation::zero(RingSpec::integers());
  bool unit_index = false;  // |a + b| = 1: every ℤ_σ factor is the zero group
};

// Weighted homology of the pair with weight (a, b) in degree n, as an abelian group.
// {a, b} = {1, −1} sums H_k for k ≤ n; otherwise sums H_k(·; ℤ_σ) over k ≤ n with k ≡ n mod 2.
// Throws InputError unless gcd(a, b) = 1.
CWPrediction cw_predict(const CWHomologyInput& in, long a, long b, int n);

// Integral homology of a model in degrees 0..n_max from the normalized (1, −1) complex at L = 1;
// models with a subcomplex give the relative groups.
CWHomologyInput integral_homology(const GridModel& model, int n_max);

struct CWDegreeCheck {
  int degree = 0;
  Presentation predicted = Presentation::zero(RingSpec::integers());
  std::optional<Presentation> direct;  // raw matrix pipeline, point model only
  bool agree = true;
};

struct CWConsistencyReport {
  std::string model;
  long a = 0, b = 0;
  bool point_model = false;
  bool ok = true;
  bool unit_index = false;
  CWHomologyInput integral;
  std::vector<CWDegreeCheck> degrees;
  nlohmann::ordered_json to_json() const;
};

// Feeds the model's integral homology to cw_predict; on the point model also compares
// with the raw matrix pipeline, and any disagreement there throws std::logic_error.
CWConsistencyReport consistency_check(const GridModel& model, long a, long b, int n_max);

}  // namespace cubar
