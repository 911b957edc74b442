#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubar/gridmodel.hpp"
#include "cubar/modalg.hpp"

namespace cubar {

// Built-in models ship as JSON text in the same format as user files.
std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
std::string builtin_json_text(const std::string& name);

// A model file either describes cells or carries integral homology data only.
struct ModelSource {
  std::optional<GridModel> model;
  std::optional<std::vector<Presentation>> integral_homology;
  std::string name;
};
ModelSource parse_model_source(const json& j, const std::string& name);
ModelSource load_model_source(const std::string& name_or_path);
GridModel load_grid_model(const std::string& name_or_path);

}  // namespace cubar
