#include "cubar/suites.hpp"

#include "cubar/gridmodel.hpp"
#include "cubar/models.hpp"

namespace cubar {

using ojson = nlohmann::ordered_json;

CubeExpr sample_base_generator(std::mt19937_64& rng, int n, int d, long N) {
  std::uniform_int_distribution<int> val(-4, 4);
  std::size_t pts = 1;
  for (int k = 0; k < n; ++k) pts *= static_cast<std::size_t>(N + 1);
  std::vector<Rat> v;
  for (std::size_t i = 0; i < pts * static_cast<std::size_t>(d); ++i) v.push_back(rat(val(rng), 3));
  return CubeExpr::base(BaseTable(n, d, N, v));
}

ojson SuiteReport::to_json() const {
  ojson j;
  j["suite"] = suite;
  j["ok"] = ok;
  j["constructible"] = constructible;
  j["cases"] = cases;
  j["passed"] = passed;
  j["details"] = details;
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"thm1", "lemma2", "lemma3", "eq7", "les", "sd-lemma4"};
  return names;
}

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::optional<WeightVector> given_weight(const SuiteOptions& o) {
  if (!o.weight) return std::nullopt;
  WeightVector w(o.ring, *o.weight);
  if (o.L && *o.L != w.L())
    throw InputError("weight has " + std::to_string(w.L() + 1) + " entries but L = " + std::to_string(*o.L));
  return w;
}

WeightVector random_weight(std::mt19937_64& rng, const RingSpec& R, int L) {
  std::vector<Rat> m;
  for (int i = 0; i <= L; ++i) m.push_back(uniform(rng, -6, 6));
  return WeightVector(R, m);
}

int pick_L(std::mt19937_64& rng, const SuiteOptions& o, const std::optional<WeightVector>& w, int max_L) {
  if (w) return w->L();
  if (o.L) {
    if (*o.L < 1) throw InputError("L must be at least 1");
    return *o.L;
  }
  return uniform(rng, 1, max_L);
}

std::pair<RingElem, RingElem> pair_weight(const SuiteOptions& o, std::mt19937_64& rng) {
  if (auto w = given_weight(o)) {
    if (w->L() != 1) throw InputError("this suite needs a two-entry weight (a,b)");
    return {(*w)[0], (*w)[1]};
  }
  return {RingElem(o.ring, Rat(uniform(rng, -4, 4))), RingElem(o.ring, Rat(uniform(rng, -4, 4)))};
}

Rat step_or(const SuiteOptions& o, const Rat& fallback) {
  if (!o.lattice_step) return fallback;
  if (*o.lattice_step <= 0 || *o.lattice_step > 1) throw InputError("lattice step must lie in (0, 1]");
  return *o.lattice_step;
}

void record(SuiteReport& r, bool pass, ojson failure) {
  ++r.cases;
  if (pass) ++r.passed;
  else {
    r.ok = false;
    r.details["failures"].push_back(std::move(failure));
  }
}

void begin(SuiteReport& r, const SuiteOptions& o) {
  r.details["seed"] = o.seed;
  r.details["ring"] = o.ring.name();
  r.details["failures"] = ojson::array();
}

SuiteReport run_boundary_squared(const SuiteOptions& o) {
  SuiteReport r{"thm1"};
  begin(r, o);
  std::mt19937_64 rng(o.seed);
  const auto fixed = given_weight(o);
  const int cases = o.cases.value_or(200), top = o.max_degree.value_or(5);
  for (int c = 0; c < cases; ++c) {
    int n = uniform(rng, 0, top), L = pick_L(rng, o, fixed, 4);
    WeightVector w = fixed ? *fixed : random_weight(rng, o.ring, L);
    CubeExpr T = sample_base_generator(rng, n, uniform(rng, 1, 2), uniform(rng, 1, 2));
    Certificate cert = verify_dd_zero(T, w);
    long expect = static_cast<long>(n) * (n - 1) * (L + 1) * (L + 1);
    bool pass = cert.ok && cert.residual.empty() && cert.terms == expect;
    record(r, pass, ojson{{"case", c}, {"n", n}, {"weight", w.str()}, {"expected_terms", expect}, {"certificate", cert.to_json()}});
  }
  return r;
}

SuiteReport run_prism(const SuiteOptions& o) {
  SuiteReport r{"lemma2"};
  begin(r, o);
  std::mt19937_64 rng(o.seed);
  const auto fixed = given_weight(o);
  std::optional<PrismHomotopy> fixed_h;
  if (fixed) {
    try {
      fixed_h = PrismHomotopy::from_weight(*fixed);
    } catch (const NoWitness& e) {
      r.constructible = false;
      r.details["weight"] = fixed->str();
      r.details["note"] = std::string(e.what());
      return r;
    }
  }
  const int cases = o.cases.value_or(50), top = o.max_degree.value_or(3);
  for (int c = 0; c < cases; ++c) {
    int n = uniform(rng, 0, top), L = pick_L(rng, o, fixed, 3);
    std::optional<PrismHomotopy> h = fixed_h;
    while (!h) {
      WeightVector w = random_weight(rng, o.ring, L);
      if (span_is_unit(w).unit) h = PrismHomotopy::from_weight(w);
    }
    CubeExpr T = sample_base_generator(rng, n, 2, uniform(rng, 1, 2));
    Certificate cert = verify_prism_identity(T, *h, step_or(o, rat(1, 6 * L)));
    record(r, cert.ok, ojson{{"case", c}, {"n", n}, {"weight", h->weight.str()}, {"certificate", cert.to_json()}});
  }
  return r;
}

SuiteReport run_sd_naturality(const SuiteOptions& o) {
  SuiteReport r{"lemma3"};
  begin(r, o);
  std::mt19937_64 rng(o.seed);
  const int cases = o.cases.value_or(50), top = o.max_degree.value_or(3);
  for (int c = 0; c < cases; ++c) {
    auto [a, b] = pair_weight(o, rng);
    int n = uniform(rng, 0, top);
    CubeExpr T = sample_base_generator(rng, n, 2, uniform(rng, 1, 2));
    Certificate cert = verify_sd_naturality(T, a, b, step_or(o, rat(1, 6)));
    record(r, cert.ok, ojson{{"case", c}, {"n", n}, {"a", a.str()}, {"b", b.str()}, {"certificate", cert.to_json()}});
  }
  return r;
}

SuiteReport run_sd_homotopy(const SuiteOptions& o) {
  SuiteReport r{"eq7"};
  begin(r, o);
  std::mt19937_64 rng(o.seed);
  const int cases = o.cases.value_or(20), top = o.max_degree.value_or(2);
  for (int c = 0; c < cases; ++c) {
    auto [a, b] = pair_weight(o, rng);
    int n = uniform(rng, 0, top);
    CubeExpr T = sample_base_generator(rng, n, 2, uniform(rng, 1, 2));
    Certificate plain = verify_sd_homotopy(T, a, b, false, step_or(o, rat(1, 6)));
    Certificate mirror = verify_sd_homotopy(T, a, b, true, step_or(o, rat(1, 6)));
    record(r, plain.ok && mirror.ok,
           ojson{{"case", c}, {"n", n}, {"a", a.str()}, {"b", b.str()}, {"plain", plain.to_json()}, {"mirror", mirror.to_json()}});
  }
  return r;
}

SuiteReport run_les(const SuiteOptions& o) {
  if (!(o.ring == RingSpec::integers())) throw InputError("les runs over Z only");
  SuiteReport r{"les"};
  begin(r, o);
  std::vector<std::string> models = o.model.empty() ? std::vector<std::string>{"interval", "d2-pair"} : std::vector<std::string>{o.model};
  std::vector<WeightVector> weights;
  if (auto w = given_weight(o)) weights.push_back(*w);
  else weights = {WeightVector::ints(o.ring, {1, -1}), WeightVector::ints(o.ring, {2, 3})};
  r.details["runs"] = ojson::array();
  for (const auto& name : models) {
    GridModel K = load_grid_model(name);
    if (!K.subcomplex) throw InputError("model '" + name + "' has no subcomplex");
    for (const auto& w : weights) {
      LesReport les = connecting_and_les_check(closure_generate(K, w.L()), closure_generate(K.sub_model(), w.L()), w);
      ojson run{{"model", K.name}, {"weight", w.str()}, {"report", les.to_json()}};
      r.details["runs"].push_back(run);
      record(r, les.exact, run);
    }
  }
  return r;
}

SuiteReport run_subdivision_class(const SuiteOptions& o) {
  if (!(o.ring == RingSpec::integers())) throw InputError("sd-lemma4 runs over Z only");
  SuiteReport r{"sd-lemma4"};
  begin(r, o);
  long a = 2, b = 3;
  if (auto w = given_weight(o)) {
    if (w->L() != 1) throw InputError("sd-lemma4 needs a two-entry weight (a,b)");
    a = w->entries()[0].value().get_num().get_si();
    b = w->entries()[1].value().get_num().get_si();
  }
  GridModel K = load_grid_model(o.model.empty() ? "s1" : o.model);
  SubdivisionClassReport rep = subdivision_class_check(K, a, b, o.max_degree.value_or(1));
  ojson run{{"model", K.name}, {"weight", {a, b}}, {"report", rep.to_json()}};
  r.details["runs"] = ojson::array({run});
  record(r, rep.ok, run);
  return r;
}

}  // namespace

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  if (opts.cases && *opts.cases < 0) throw InputError("case count must be non-negative");
  if (opts.max_degree && *opts.max_degree < 0) throw InputError("degree bound must be non-negative");
  if (name == "thm1") return run_boundary_squared(opts);
  if (name == "lemma2") return run_prism(opts);
  if (name == "lemma3") return run_sd_naturality(opts);
  if (name == "eq7") return run_sd_homotopy(opts);
  if (name == "les") return run_les(opts);
  if (name == "sd-lemma4") return run_subdivision_class(opts);
  throw InputError("unknown suite '" + name + "'");
}

}  // namespace cubar
