#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cubar/homotopylab.hpp"
#include "json.hpp"

namespace cubar {

// A Base generator Iⁿ → ℝᵈ tabulated on N+1 points per axis, values in thirds within [−4/3, 4/3].
CubeExpr sample_base_generator(std::mt19937_64& rng, int n, int d, long N);

struct SuiteOptions {
  RingSpec ring = RingSpec::integers();
  std::optional<std::vector<Rat>> weight;
  std::optional<int> L;
  std::uint64_t seed = 1;
  std::optional<Rat> lattice_step;
  std::optional<int> cases;
  std::optional<int> max_degree;
  std::string model;  // les and sd-lemma4 only; empty selects the defaults
};

struct SuiteReport {
  std::string suite;
  bool ok = true;
  bool constructible = true;
  long cases = 0;
  long passed = 0;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  nlohmann::ordered_json to_json() const;
};

// thm1, lemma2, lemma3, eq7, les, sd-lemma4.
const std::vector<std::string>& suite_names();
// Deterministic for fixed options; throws InputError on an unknown suite or inconsistent options.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts);

}  // namespace cubar
