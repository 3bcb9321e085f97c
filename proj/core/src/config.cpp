#include <stdexcept>

#include "json.hpp"
#include "tfcond/model.hpp"

namespace tfcond {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

ModelConfig parse_model_config(const std::string& json_text,
                               const std::set<std::string>& allowed_sections) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config root must be an object");
  for (auto it = root.begin(); it != root.end(); ++it) {
    const auto& k = it.key();
    if (k != "trap" && k != "interaction" && k != "regime" && !allowed_sections.count(k))
      throw std::invalid_argument("unknown key '" + k + "' in config");
  }

  ModelConfig cfg;
  try {
    if (root.contains("trap")) {
      const auto& t = root["trap"];
      reject_unknown(t, "trap", {"strength", "s"});
      cfg.trap.strength = t.value("strength", cfg.trap.strength);
      cfg.trap.s = t.value("s", cfg.trap.s);
    }
    if (root.contains("interaction")) {
      const auto& v = root["interaction"];
      reject_unknown(v, "interaction", {"profile", "beta"});
      cfg.interaction.profile = v.value("profile", cfg.interaction.profile);
      cfg.interaction.beta = v.value("beta", cfg.interaction.beta);
    }
    if (root.contains("regime")) {
      const auto& r = root["regime"];
      reject_unknown(r, "regime", {"N", "g_N", "lambda_weight"});
      cfg.regime.N = r.value("N", cfg.regime.N);
      cfg.regime.g_N = r.value("g_N", cfg.regime.g_N);
      cfg.regime.lambda_weight = r.value("lambda_weight", cfg.regime.lambda_weight);
    }
  } catch (const json::type_error& e) {
    throw std::invalid_argument(std::string("config value has the wrong type: ") + e.what());
  }
  cfg.regime.beta = cfg.interaction.beta;
  cfg.trap.validate();
  cfg.interaction.validate();
  cfg.regime.validate();
  return cfg;
}

}  // namespace tfcond
