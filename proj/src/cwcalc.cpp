#include "cubar/cwcalc.hpp"

#include <numeric>

#include "cubar/models.hpp"
#include "cubar/reduce.hpp"

namespace cubar {

namespace {

const RingSpec ZZ = RingSpec::integers();

}  // namespace

CWHomologyInput CWHomologyInput::from_json(const nlohmann::ordered_json& j) {
  const nlohmann::ordered_json* arr = &j;
  if (j.is_object()) {
    if (j.contains("homology")) arr = &j["homology"];
    else if (j.contains("integral_H")) arr = &j["integral_H"];
    else throw InputError("homology: expected an array of presentations");
  }
  if (!arr->is_array()) throw InputError("homology: expected an array of presentations");
  CWHomologyInput in;
  for (std::size_t k = 0; k < arr->size(); ++k) {
    try {
      in.integral_H.push_back(presentation_from_json(ZZ, (*arr)[k]));
    } catch (const InputError& e) {
      throw InputError("homology[" + std::to_string(k) + "]: " + e.what());
    }
  }
  return in;
}

const Presentation& CWHomologyInput::at(int k) const {
  static const Presentation zero = Presentation::zero(RingSpec::integers());
  return k < 0 || k > top() ? zero : integral_H[static_cast<std::size_t>(k)];
}

CWPrediction cw_predict(const CWHomologyInput& in, long a, long b, int n) {
  if (std::gcd(a, b) != 1)
    throw InputError("weight (" + std::to_string(a) + "," + std::to_string(b) + "): gcd must be 1");
  if (n < 0) throw InputError("degree must be non-negative");
  CWPrediction out;
  if (a + b == 0) {
    for (int k = 0; k <= n; ++k) out.group = out.group + in.at(k);
    return out;
  }
  const Int s = abs(Int(a + b));
  if (s == 1) {
    out.unit_index = true;
    return out;
  }
  std::vector<Presentation> H;
  for (int k = 0; k <= n; ++k) H.push_back(in.at(k));
  for (int k = n % 2; k <= n; k += 2) out.group = out.group + change_coefficients(H, s, k);
  return out;
}

CWHomologyInput integral_homology(const GridModel& model, int n_max) {
  const WeightVector w = WeightVector::ints(ZZ, {1, -1});
  GeneratorSet X = closure_generate(model, 1);
  CWHomologyInput in;
  if (model.subcomplex) {
    GeneratorSet A = closure_generate(model.sub_model(), 1);
    in.integral_H = free_homology(pair_matrices(X, A, w), n_max);
  } else {
    in.integral_H = presented_homology(gamma_boundary_matrices(X, w), n_max);
  }
  return in;
}

namespace {

bool is_point(const GridModel& model) {
  if (model.subcomplex) return false;
  GeneratorSet g = closure_generate(model, 1);
  return g.total() == 1 && g.count(0) == 1;
}

}  // namespace

CWConsistencyReport consistency_check(const GridModel& model, long a, long b, int n_max) {
  CWConsistencyReport r;
  r.model = model.name;
  r.a = a;
  r.b = b;
  r.point_model = is_point(model);
  r.integral = integral_homology(model, n_max);
  std::vector<Presentation> direct;
  if (r.point_model)
    direct = point_theory_matrices(WeightVector::ints(ZZ, {a, b}), n_max, PointVariant::raw());
  for (int n = 0; n <= n_max; ++n) {
    CWPrediction p = cw_predict(r.integral, a, b, n);
    r.unit_index = r.unit_index || p.unit_index;
    CWDegreeCheck c{n, p.group, std::nullopt, true};
    if (r.point_model) {
      c.direct = direct[static_cast<std::size_t>(n)];
      c.agree = *c.direct == c.predicted;
      if (!c.agree)
        throw std::logic_error("point model: prediction " + c.predicted.str() + " differs from raw " + c.direct->str() +
                               " in degree " + std::to_string(n));
    }
    r.ok = r.ok && c.agree;
    r.degrees.push_back(c);
  }
  return r;
}

nlohmann::ordered_json CWConsistencyReport::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["weight"] = {a, b};
  j["point_model"] = point_model;
  j["ok"] = ok;
  if (unit_index) j["warning"] = "|a+b| = 1: every Z_sigma factor is the zero group";
  auto h = nlohmann::ordered_json::array();
  for (const auto& p : integral.integral_H) h.push_back(cubar::to_json(p));
  j["integral_homology"] = h;
  auto ds = nlohmann::ordered_json::array();
  for (const auto& c : degrees) {
    nlohmann::ordered_json d;
    d["degree"] = c.degree;
    d["predicted"] = cubar::to_json(c.predicted);
    if (c.direct) d["direct"] = cubar::to_json(*c.direct);
    d["agree"] = c.agree;
    ds.push_back(d);
  }
  j["degrees"] = ds;
  return j;
}

}  // namespace cubar
