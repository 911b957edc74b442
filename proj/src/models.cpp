#include "cubar/models.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace cubar {

namespace {

const char* kPoint = R"({"name":"point","dim":1,"L":1,"top_cells":[{"base":[0],"extent":[0]}]})";

const char* kInterval = R"({"name":"interval","dim":1,"L":1,
 "top_cells":[{"base":[0],"extent":[1]}],
 "subcomplex":[{"base":[0],"extent":[0]},{"base":[1],"extent":[0]}]})";

const char* kS1 = R"({"name":"s1","dim":2,"L":1,
 "top_cells":[{"base":[0,0],"extent":[1,0]},{"base":[0,1],"extent":[1,0]},
              {"base":[0,0],"extent":[0,1]},{"base":[1,0],"extent":[0,1]}]})";

const char* kS2 = R"({"name":"s2","dim":3,"L":1,
 "top_cells":[{"base":[0,0,0],"extent":[1,1,0]},{"base":[0,0,1],"extent":[1,1,0]},
              {"base":[0,0,0],"extent":[1,0,1]},{"base":[0,1,0],"extent":[1,0,1]},
              {"base":[0,0,0],"extent":[0,1,1]},{"base":[1,0,0],"extent":[0,1,1]}]})";

const char* kD2Pair = R"({"name":"d2-pair","dim":2,"L":1,
 "top_cells":[{"base":[0,0],"extent":[1,1]}],
 "subcomplex":[{"base":[0,0],"extent":[1,0]},{"base":[0,1],"extent":[1,0]},
               {"base":[0,0],"extent":[0,1]},{"base":[1,0],"extent":[0,1]}]})";

// The Klein bottle enters as integral homology data; it has no square model here.
const char* kKlein = R"({"name":"klein","homology":[{"rank":1,"torsion":[]},{"rank":1,"torsion":[2]},{"rank":0,"torsion":[]}]})";

// T² = S¹ × S¹ with both factors the unit square boundary, 16 squares in ℤ⁴.
std::string torus_text() {
  const std::vector<std::pair<std::vector<long>, std::vector<int>>> edges = {
      {{0, 0}, {1, 0}}, {{0, 1}, {1, 0}}, {{0, 0}, {0, 1}}, {{1, 0}, {0, 1}}};
  json cells = json::array();
  for (const auto& [b1, e1] : edges)
    for (const auto& [b2, e2] : edges) {
      std::vector<long> base = b1;
      base.insert(base.end(), b2.begin(), b2.end());
      std::vector<int> ext = e1;
      ext.insert(ext.end(), e2.begin(), e2.end());
      cells.push_back(json{{"base", base}, {"extent", ext}});
    }
  return json{{"name", "t2"}, {"dim", 4}, {"L", 1}, {"top_cells", cells}}.dump();
}

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

Cell parse_cell(const json& c, int dim, const std::string& where) {
  if (!c.is_object()) bad(where, "expected an object with base and extent");
  if (!c.contains("base") || !c["base"].is_array()) bad(where + ".base", "expected an array");
  if (!c.contains("extent") || !c["extent"].is_array()) bad(where + ".extent", "expected an array");
  if (static_cast<int>(c["base"].size()) != dim) bad(where + ".base", "length differs from dim " + std::to_string(dim));
  if (static_cast<int>(c["extent"].size()) != dim) bad(where + ".extent", "length differs from dim " + std::to_string(dim));
  Cell cell;
  for (std::size_t k = 0; k < c["base"].size(); ++k) {
    const json& v = c["base"][k];
    if (!v.is_number_integer()) bad(where + ".base[" + std::to_string(k) + "]", "expected an integer");
    cell.base.push_back(v.get<long>());
  }
  for (std::size_t k = 0; k < c["extent"].size(); ++k) {
    const json& v = c["extent"][k];
    if (!v.is_number_integer() || (v.get<long>() != 0 && v.get<long>() != 1))
      bad(where + ".extent[" + std::to_string(k) + "]", "expected 0 or 1");
    cell.extent.push_back(static_cast<int>(v.get<long>()));
  }
  return cell;
}

std::vector<Cell> parse_cells(const json& arr, int dim, const std::string& field) {
  if (!arr.is_array()) bad(field, "expected an array of cells");
  std::vector<Cell> cells;
  std::set<std::pair<std::vector<long>, std::vector<int>>> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string where = field + "[" + std::to_string(i) + "]";
    Cell c = parse_cell(arr[i], dim, where);
    if (!seen.insert({c.base, c.extent}).second) bad(where, "duplicate cell");
    cells.push_back(c);
  }
  return cells;
}

json cells_json(const std::vector<Cell>& cells) {
  json a = json::array();
  for (const auto& c : cells) a.push_back(json{{"base", c.base}, {"extent", c.extent}});
  return a;
}

}  // namespace

json GridModel::to_json() const {
  json j;
  if (!name.empty()) j["name"] = name;
  j["dim"] = dim;
  j["L"] = L;
  j["top_cells"] = cells_json(top_cells);
  if (subcomplex) j["subcomplex"] = cells_json(*subcomplex);
  return j;
}

GridModel GridModel::from_json(const json& j) {
  if (!j.is_object()) bad("model", "expected a JSON object");
  GridModel m;
  if (j.contains("name")) {
    if (!j["name"].is_string()) bad("name", "expected a string");
    m.name = j["name"].get<std::string>();
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long>() < 0)
    bad("dim", "expected a non-negative integer");
  m.dim = static_cast<int>(j["dim"].get<long>());
  if (j.contains("L")) {
    if (!j["L"].is_number_integer() || j["L"].get<long>() < 1) bad("L", "expected a positive integer");
    m.L = static_cast<int>(j["L"].get<long>());
  }
  if (!j.contains("top_cells")) bad("top_cells", "missing");
  m.top_cells = parse_cells(j["top_cells"], m.dim, "top_cells");
  if (j.contains("subcomplex")) m.subcomplex = parse_cells(j["subcomplex"], m.dim, "subcomplex");
  return m;
}

GridModel GridModel::sub_model() const {
  GridModel a;
  a.name = name + "/sub";
  a.dim = dim;
  a.L = L;
  if (subcomplex) a.top_cells = *subcomplex;
  return a;
}

std::vector<std::string> builtin_names() { return {"point", "interval", "s1", "s2", "t2", "klein", "d2-pair"}; }

bool is_builtin(const std::string& name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

std::string builtin_json_text(const std::string& name) {
  if (name == "point") return kPoint;
  if (name == "interval") return kInterval;
  if (name == "s1") return kS1;
  if (name == "s2") return kS2;
  if (name == "t2") return torus_text();
  if (name == "klein") return kKlein;
  if (name == "d2-pair") return kD2Pair;
  throw InputError("unknown built-in model '" + name + "'");
}

ModelSource parse_model_source(const json& j, const std::string& name) {
  ModelSource src;
  src.name = name;
  if (j.is_object() && j.contains("name") && j["name"].is_string()) src.name = j["name"].get<std::string>();
  if (j.is_object() && (j.contains("homology") || j.contains("integral_H"))) {
    const json& h = j.contains("homology") ? j["homology"] : j["integral_H"];
    if (!h.is_array()) bad("homology", "expected an array of presentations");
    std::vector<Presentation> hs;
    for (std::size_t k = 0; k < h.size(); ++k) {
      try {
        hs.push_back(presentation_from_json(RingSpec::integers(), h[k]));
      } catch (const InputError& e) {
        bad("homology[" + std::to_string(k) + "]", e.what());
      }
    }
    src.integral_homology = hs;
    return src;
  }
  src.model = GridModel::from_json(j);
  if (src.model->name.empty()) src.model->name = src.name;
  return src;
}

ModelSource load_model_source(const std::string& name_or_path) {
  std::string text;
  if (is_builtin(name_or_path)) {
    text = builtin_json_text(name_or_path);
  } else {
    std::ifstream in(name_or_path);
    if (!in) throw InputError("model '" + name_or_path + "' is neither a built-in name nor a readable file");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(name_or_path + ": " + e.what());
  }
  return parse_model_source(j, name_or_path);
}

GridModel load_grid_model(const std::string& name_or_path) {
  ModelSource src = load_model_source(name_or_path);
  if (!src.model) throw InputError("model '" + src.name + "' carries homology data only and has no cells");
  return *src.model;
}

}  // namespace cubar
