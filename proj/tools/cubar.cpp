#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cubar/cwcalc.hpp"
#include "cubar/gridmodel.hpp"
#include "cubar/models.hpp"
#include "cubar/reduce.hpp"
#include "cubar/suites.hpp"
#include "json.hpp"

using namespace cubar;
using ojson = nlohmann::ordered_json;

namespace {

// Exit statuses.
constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

struct Flags {
  std::string ring = "Z";
  std::string weight;
  std::optional<int> L;
  std::string beta;
  std::string variant;
  std::optional<std::string> degrees;
  std::string model;
  std::string input;
  std::uint64_t seed = 1;
  std::string lattice_step;
  std::optional<int> cases;
  bool json = false;
  bool text = false;
  bool timing = false;
  bool relative = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

std::vector<Rat> parse_weight(const std::string& s) {
  std::vector<Rat> m;
  try {
    for (const auto& p : split(s, ',')) m.push_back(parse_rat(p));
  } catch (const InputError& e) {
    throw InputError(std::string("--weight: ") + e.what());
  }
  if (m.size() < 2) throw InputError("--weight: expected at least two comma-separated entries");
  return m;
}

WeightVector weight_of(const Flags& f, const RingSpec& R, const char* fallback = "1,-1") {
  WeightVector w(R, parse_weight(f.weight.empty() ? fallback : f.weight));
  if (f.L && *f.L != w.L())
    throw InputError("--weight has " + std::to_string(w.L() + 1) + " entries but --L is " + std::to_string(*f.L));
  return w;
}

std::pair<int, int> parse_degrees(const std::optional<std::string>& given) {
  const std::string s = given.value_or("0..4");
  auto dots = s.find("..");
  int lo, hi;
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(s);
    } else {
      lo = std::stoi(s.substr(0, dots));
      hi = std::stoi(s.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw InputError("--degrees: expected N or LO..HI, got '" + s + "'");
  }
  if (lo < 0 || hi < lo) throw InputError("--degrees: need 0 <= LO <= HI, got '" + s + "'");
  if (hi > 64) throw InputError("--degrees: the upper bound is limited to 64");
  return {lo, hi};
}

// Variant from --variant and --beta; --beta alone selects the truncated complex, "inf" the normalized one.
std::optional<int> beta_of(const Flags& f, std::string& label, const char* fallback) {
  std::string v = f.variant;
  if (v.empty()) v = f.beta.empty() ? fallback : "beta";
  if (v == "raw") {
    label = "raw";
    return 0;
  }
  if (v == "normalized") {
    label = "normalized";
    return std::nullopt;
  }
  if (v != "beta") throw InputError("--variant: expected raw, normalized or beta, got '" + v + "'");
  if (f.beta.empty()) throw InputError("--variant beta needs --beta k|inf");
  if (f.beta == "inf") {
    label = "beta=inf";
    return std::nullopt;
  }
  Int b = parse_int(f.beta);
  if (b < 0 || b > 64) throw InputError("--beta: expected a non-negative integer or inf");
  label = "beta=" + b.get_str();
  return static_cast<int>(b.get_si());
}

ojson rat_list(const WeightVector& w) {
  ojson a = ojson::array();
  for (const auto& e : w.entries()) a.push_back(to_string(e.value()));
  return a;
}

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const { return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_;
};

void emit(const Flags& f, const ojson& report, const std::string& text) {
  if (f.text) std::cout << text;
  else std::cout << report.dump(2) << "\n";
}

std::string degree_lines(const ojson& degrees, const char* key, const char* label) {
  std::ostringstream out;
  for (const auto& d : degrees) out << label << "_" << d["degree"].get<int>() << " = " << d[key].get<std::string>() << "\n";
  return out.str();
}

ojson presentation_entry(int n, const Presentation& p) {
  ojson e;
  e["degree"] = n;
  e["homology"] = to_json(p);
  e["text"] = p.str();
  return e;
}

int cmd_homology(const Flags& f, const std::string& command) {
  Timer t;
  const RingSpec R = RingSpec::parse(f.ring);
  const WeightVector w = weight_of(f, R);
  auto [lo, hi] = parse_degrees(f.degrees);
  std::string label;
  const std::optional<int> beta = beta_of(f, label, "normalized");
  if (f.model.empty()) throw InputError("--model is required");
  const GridModel K = load_grid_model(f.model);
  if (f.relative && !K.subcomplex) throw InputError("--relative: model '" + K.name + "' has no subcomplex");

  // Degenerates matter only in raw degrees, which reach at most hi + 1.
  ClosureOptions opts;
  if (beta && *beta <= hi + 1) opts.degenerate_up_to = hi + 1;
  GeneratorSet X = closure_generate(K, w.L(), opts);
  std::optional<GeneratorSet> A;
  if (f.relative) A = closure_generate(K.sub_model(), w.L(), opts);
  std::vector<Presentation> H = presented_homology(beta_complex(X, w, beta, A ? &*A : nullptr), hi);

  ojson r;
  r["command"] = command;
  r["model"] = K.name;
  r["relative"] = f.relative;
  r["ring"] = R.name();
  r["weight"] = rat_list(w);
  r["variant"] = label;
  ojson counts = ojson::array();
  for (int n = 0; n <= X.top(); ++n) counts.push_back(X.count(n));
  r["model_stats"] = {{"generators", counts}, {"total", X.total()}};
  if (A) r["model_stats"]["subcomplex_total"] = A->total();
  r["degrees"] = ojson::array();
  for (int n = lo; n <= hi; ++n) r["degrees"].push_back(presentation_entry(n, H[static_cast<std::size_t>(n)]));
  if (f.timing) r["timing_ms"] = t.ms();
  emit(f, r, degree_lines(r["degrees"], "text", "H"));
  return kOk;
}

int cmd_point_table(const Flags& f) {
  Timer t;
  const RingSpec R = RingSpec::parse(f.ring);
  const WeightVector w = weight_of(f, R);
  auto [lo, hi] = parse_degrees(f.degrees);
  std::string label;
  const std::optional<int> beta = beta_of(f, label, "raw");
  PointVariant v = !beta ? PointVariant::normalized() : *beta == 0 ? PointVariant::raw() : PointVariant::truncated(*beta);
  auto closed = point_theory_table(w, hi, v);
  auto matrices = point_theory_matrices(w, hi, v);
  bool agree = true;
  ojson r;
  r["command"] = "point-table";
  r["ring"] = R.name();
  r["weight"] = rat_list(w);
  r["sigma"] = to_string(index(w).value());
  r["variant"] = v.str();
  r["degrees"] = ojson::array();
  std::ostringstream text;
  for (int n = lo; n <= hi; ++n) {
    const auto& c = closed[static_cast<std::size_t>(n)];
    const auto& m = matrices[static_cast<std::size_t>(n)];
    agree = agree && c == m;
    r["degrees"].push_back({{"degree", n}, {"closed_form", to_json(c)}, {"matrices", to_json(m)}, {"agree", c == m}, {"text", c.str()}});
    text << "H_" << n << " = " << c.str() << (c == m ? "" : "   (matrices: " + m.str() + ")") << "\n";
  }
  r["agree"] = agree;
  if (f.timing) r["timing_ms"] = t.ms();
  emit(f, r, text.str());
  return agree ? kOk : kFailed;
}

int cmd_verify(const Flags& f, const std::string& suite) {
  Timer t;
  SuiteOptions o;
  o.ring = RingSpec::parse(f.ring);
  if (!f.weight.empty()) o.weight = parse_weight(f.weight);
  o.L = f.L;
  o.seed = f.seed;
  if (!f.lattice_step.empty()) o.lattice_step = parse_rat(f.lattice_step);
  o.cases = f.cases;
  if (f.degrees) o.max_degree = parse_degrees(f.degrees).second;
  o.model = f.model;
  SuiteReport rep = run_suite(suite, o);
  ojson r = rep.to_json();
  if (f.timing) r["timing_ms"] = t.ms();
  std::string status = !rep.constructible ? "unconstructible" : rep.ok ? "pass" : "FAIL";
  std::ostringstream text;
  text << suite << ": " << status << " (" << rep.passed << "/" << rep.cases << ")\n";
  if (rep.details.contains("note")) text << "  " << rep.details["note"].get<std::string>() << "\n";
  emit(f, r, text.str());
  return rep.ok ? kOk : kFailed;
}

int cmd_cw_predict(const Flags& f) {
  Timer t;
  std::string source = f.input.empty() ? f.model : f.input;
  if (source.empty()) throw InputError("--input (homology or model JSON, or a built-in name) is required");
  const WeightVector w = weight_of(f, RingSpec::integers());
  if (w.L() != 1) throw InputError("--weight: expected two integers a,b");
  long a = w[0].value().get_num().get_si(), b = w[1].value().get_num().get_si();
  auto [lo, hi] = parse_degrees(f.degrees);

  ModelSource src = load_model_source(source);
  ojson r;
  r["command"] = "cw-predict";
  r["input"] = src.name;
  r["weight"] = {a, b};
  CWHomologyInput in;
  std::optional<CWConsistencyReport> check;
  if (src.integral_homology) {
    in.integral_H = *src.integral_homology;
  } else {
    check = consistency_check(*src.model, a, b, hi);
    in = check->integral;
  }
  ojson h = ojson::array();
  for (const auto& p : in.integral_H) h.push_back(to_json(p));
  r["integral_homology"] = h;
  r["degrees"] = ojson::array();
  bool unit = false, ok = true;
  for (int n = lo; n <= hi; ++n) {
    CWPrediction p = cw_predict(in, a, b, n);
    unit = unit || p.unit_index;
    ojson d{{"degree", n}, {"prediction", to_json(p.group)}, {"text", p.group.str()}};
    if (check && check->point_model) {
      const auto& c = check->degrees[static_cast<std::size_t>(n)];
      d["direct"] = to_json(*c.direct);
      d["agree"] = c.agree;
      ok = ok && c.agree;
    }
    r["degrees"].push_back(d);
  }
  if (unit) r["warning"] = "|a+b| = 1: every Z_sigma factor is the zero group";
  if (f.timing) r["timing_ms"] = t.ms();
  std::string text = degree_lines(r["degrees"], "text", "H");
  if (unit) text += "warning: |a+b| = 1, every Z_sigma factor is the zero group\n";
  emit(f, r, text);
  return ok ? kOk : kFailed;
}

void add_common(CLI::App* c, Flags& f) {
  c->add_option("--ring", f.ring, "Coefficient ring: Z, Q or Z/n");
  c->add_option("--weight", f.weight, "Comma-separated weight entries m_0,...,m_L");
  c->add_option("--L", f.L, "Number of slices minus one; must match the weight");
  c->add_option("--degrees", f.degrees, "Degree range N or LO..HI");
  c->add_option("--model", f.model, "Built-in model name or path to a model JSON file");
  c->add_option("--seed", f.seed, "Seed for randomized suites");
  c->add_option("--lattice-step", f.lattice_step, "Lattice step p/q for exact map comparison");
  auto* j = c->add_flag("--json", f.json, "JSON output (default)");
  auto* t = c->add_flag("--text", f.text, "Plain text output");
  j->excludes(t);
  c->add_flag("--timing", f.timing, "Include wall-clock timing in the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted cubical homology calculator"};
  app.require_subcommand(1);
  Flags f;
  std::string suite;

  auto* homology = app.add_subcommand("homology", "Homology of a model");
  add_common(homology, f);
  homology->add_option("--variant", f.variant, "raw, normalized or beta");
  homology->add_option("--beta", f.beta, "Truncation degree k, or inf");
  homology->add_flag("--relative", f.relative, "Use the model's subcomplex and compute relative homology");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  add_common(verify, f);
  verify->add_option("suite", suite, "thm1, lemma2, lemma3, eq7, les or sd-lemma4")->required();
  verify->add_option("--cases", f.cases, "Number of random cases");

  auto* point = app.add_subcommand("point-table", "Homology of a point: closed form against matrices");
  add_common(point, f);
  point->add_option("--variant", f.variant, "raw, normalized or beta");
  point->add_option("--beta", f.beta, "Truncation degree k, or inf");

  auto* predict = app.add_subcommand("cw-predict", "Weighted homology of a CW pair from integral homology");
  add_common(predict, f);
  predict->add_option("--input", f.input, "Homology JSON, model JSON or built-in name");

  auto* normalize = app.add_subcommand("normalize", "Homology of the beta-truncated complex");
  add_common(normalize, f);
  normalize->add_option("--beta", f.beta, "Truncation degree k, or inf")->required();
  normalize->add_flag("--relative", f.relative, "Use the model's subcomplex and compute relative homology");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*homology) return cmd_homology(f, "homology");
    if (*normalize) {
      f.variant = "beta";
      return cmd_homology(f, "normalize");
    }
    if (*point) return cmd_point_table(f);
    if (*verify) return cmd_verify(f, suite);
    if (*predict) return cmd_cw_predict(f);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
