#include "spiral/config.hpp"

#include <cstdint>
#include <fstream>

namespace spiral::config {

namespace {

Vec2 parse_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(where + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

Complex parse_complex(const json& j, const std::string& where) {
  const Vec2 v = parse_vec2(j, where);
  return {v.x, v.y};
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

// Exponent keys: "20", "11", ... or "i,j" for exponents above 9.
std::pair<int, int> parse_exponents(const std::string& key, const std::string& where) {
  const auto comma = key.find(',');
  try {
    if (comma != std::string::npos) {
      return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
    }
    if (key.size() == 2) {
      return {key[0] - '0', key[1] - '0'};
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(where + ": bad exponent key '" + key + "'");
}

std::string exponents_key(int i, int j) {
  if (i <= 9 && j <= 9) return std::to_string(i) + std::to_string(j);
  return std::to_string(i) + "," + std::to_string(j);
}

planar::CoeffTable parse_coeffs(const json& j, const std::string& where) {
  planar::CoeffTable table;
  if (!j.is_object()) throw ConfigError(where + ": expected a coefficient table");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const auto exps = parse_exponents(key, where);
    if (exps.first < 0 || exps.second < 0) {
      throw ConfigError(where + "." + key + ": negative exponent");
    }
    table[exps] = value.get<double>();
  }
  return table;
}

json coeffs_to_json(const planar::CoeffTable& table) {
  json j = json::object();
  for (const auto& [ij, c] : table) {
    j[exponents_key(ij.first, ij.second)] = c;
  }
  return j;
}

planar::PlanarField parse_field(const json& j, const std::string& where, const Vec2& base_default,
                                const char* key1, const char* key2) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  planar::CoeffTable c1, c2;
  if (j.contains(key1)) c1 = parse_coeffs(j[key1], where + "." + key1);
  if (j.contains(key2)) c2 = parse_coeffs(j[key2], where + "." + key2);
  Vec2 base = base_default;
  if (j.contains("base")) base = parse_vec2(j["base"], where + ".base");
  std::optional<planar::GaussianEnvelope> env;
  if (j.contains("envelope")) {
    const auto& je = j["envelope"];
    planar::GaussianEnvelope e;
    if (!je.contains("rate")) throw ConfigError(where + ".envelope: missing rate");
    e.rate = je["rate"].get<double>();
    e.center = je.contains("center") ? parse_vec2(je["center"], where + ".envelope.center")
                                     : Vec2{0.0, 0.0};
    env = e;
  }
  return planar::PlanarField{base, std::move(c1), std::move(c2), env};
}

json field_to_json(const planar::PlanarField& f, const char* key1, const char* key2) {
  json j = json::object();
  j[key1] = coeffs_to_json(f.component(0));
  j[key2] = coeffs_to_json(f.component(1));
  j["base"] = vec2_to_json(f.base());
  if (f.envelope()) {
    j["envelope"] = {{"rate", f.envelope()->rate},
                     {"center", vec2_to_json(f.envelope()->center)}};
  }
  return j;
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

std::string digest(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

planar::MapSpec parse_map_spec(const json& root) {
  if (!root.contains("map")) throw ConfigError("config: missing 'map'");
  const json& j = root["map"];
  planar::MapSpec spec;
  if (!j.contains("xi")) throw ConfigError("map: missing 'xi'");
  spec.xi = parse_vec2(j["xi"], "map.xi");
  if (!j.contains("f")) throw ConfigError("map: missing origin field 'f'");
  if (!j.contains("g")) throw ConfigError("map: missing xi field 'g'");
  spec.field_origin = parse_field(j["f"], "map.f", {0.0, 0.0}, "a", "b");
  spec.field_xi = parse_field(j["g"], "map.g", spec.xi, "c", "d");
  if (j.contains("general")) {
    const json& gen = j["general"];
    if (gen.contains("f_corr")) {
      spec.corr_origin = parse_field(gen["f_corr"], "map.general.f_corr", {0.0, 0.0}, "a", "b");
    }
    if (gen.contains("g_corr")) {
      spec.corr_xi = parse_field(gen["g_corr"], "map.general.g_corr", {0.0, 0.0}, "c", "d");
    }
    if (gen.contains("cross")) {
      spec.cross = parse_field(gen["cross"], "map.general.cross", {0.0, 0.0}, "a", "b");
    }
  }
  spec.validate();
  return spec;
}

json map_spec_to_json(const planar::MapSpec& spec) {
  json j = json::object();
  j["xi"] = vec2_to_json(spec.xi);
  j["f"] = field_to_json(spec.field_origin, "a", "b");
  j["g"] = field_to_json(spec.field_xi, "c", "d");
  if (spec.has_general_parts()) {
    json gen = json::object();
    if (spec.corr_origin) gen["f_corr"] = field_to_json(*spec.corr_origin, "a", "b");
    if (spec.corr_xi) gen["g_corr"] = field_to_json(*spec.corr_xi, "c", "d");
    if (spec.cross) gen["cross"] = field_to_json(*spec.cross, "a", "b");
    j["general"] = gen;
  }
  return json{{"map", j}};
}

planar::Window parse_window(const json& j, const planar::MapSpec& spec) {
  if (!j.contains("window")) return planar::default_window(spec);
  const json& w = j["window"];
  if (!w.is_array() || w.size() != 4) {
    throw ConfigError("window: expected [x_min, x_max, y_min, y_max]");
  }
  planar::Window out;
  out.x_min = w[0].get<double>();
  out.x_max = w[1].get<double>();
  out.y_min = w[2].get<double>();
  out.y_max = w[3].get<double>();
  if (out.x_min >= out.x_max || out.y_min >= out.y_max) {
    throw ConfigError("window: empty extent");
  }
  return out;
}

json window_to_json(const planar::Window& w) {
  return json::array({w.x_min, w.x_max, w.y_min, w.y_max});
}

bundle::CenterBundleSystem parse_bundle_system(const json& root) {
  if (!root.contains("system")) throw ConfigError("config: missing 'system'");
  const json& j = root["system"];
  bundle::CenterBundleSystem sys;
  if (!j.contains("v")) throw ConfigError("system: missing 'v'");
  sys.v = parse_complex(j["v"], "system.v");
  if (!j.contains("centers") || !j["centers"].is_array()) {
    throw ConfigError("system: missing 'centers' array");
  }
  for (size_t k = 0; k < j["centers"].size(); ++k) {
    sys.centers.push_back(parse_complex(j["centers"][k], "system.centers"));
  }
  if (!j.contains("perturbations") || !j["perturbations"].is_array()) {
    throw ConfigError("system: missing 'perturbations' array");
  }
  for (const auto& jp : j["perturbations"]) {
    bundle::PerturbationFn::Terms terms;
    if (!jp.contains("terms") || !jp["terms"].is_array()) {
      throw ConfigError("system.perturbations: each entry needs a 'terms' array");
    }
    for (const auto& jt : jp["terms"]) {
      if (!jt.contains("k") || !jt.contains("l") || !jt.contains("c")) {
        throw ConfigError("system.perturbations.terms: expected {k, l, c}");
      }
      const int k = jt["k"].get<int>();
      const int l = jt["l"].get<int>();
      if (k < 0 || l < 0) throw ConfigError("system.perturbations.terms: negative exponent");
      terms[{k, l}] = parse_complex(jt["c"], "system.perturbations.terms.c");
    }
    sys.perturbations.emplace_back(std::move(terms));
  }
  if (!j.contains("lambda") || !j["lambda"].is_array()) {
    throw ConfigError("system: missing 'lambda' array");
  }
  for (const auto& jl : j["lambda"]) sys.lambda.push_back(jl.get<double>());
  sys.validate();
  return sys;
}

json bundle_system_to_json(const bundle::CenterBundleSystem& sys) {
  json j = json::object();
  j["v"] = complex_to_json(sys.v);
  j["centers"] = json::array();
  for (const auto& c : sys.centers) j["centers"].push_back(complex_to_json(c));
  j["perturbations"] = json::array();
  for (const auto& p : sys.perturbations) {
    json terms = json::array();
    for (const auto& [kl, c] : p.terms()) {
      terms.push_back({{"k", kl.first}, {"l", kl.second}, {"c", complex_to_json(c)}});
    }
    j["perturbations"].push_back({{"terms", terms}});
  }
  j["lambda"] = sys.lambda;
  return json{{"system", j}};
}

rd::ModelSpec parse_rd_model(const json& root) {
  if (!root.contains("model")) throw ConfigError("config: missing 'model'");
  const json& j = root["model"];
  rd::ModelSpec model;
  const std::string kin = j.value("kinetics", "fhn");
  if (kin == "fhn") {
    model.kinetics = rd::Kinetics::fhn;
    model.diff_u = 1.0;
    model.diff_v = 0.0;
  } else if (kin == "oregonator") {
    model.kinetics = rd::Kinetics::oregonator;
    model.diff_u = 1.0;
    model.diff_v = 0.6;
  } else {
    throw ConfigError("model.kinetics: unknown kinetics '" + kin + "'");
  }
  if (j.contains("fhn")) {
    const json& jf = j["fhn"];
    model.fhn.sigma = jf.value("sigma", model.fhn.sigma);
    model.fhn.beta = jf.value("beta", model.fhn.beta);
    model.fhn.gamma = jf.value("gamma", model.fhn.gamma);
    model.fhn.phi_v_sign = jf.value("phi_v_sign", model.fhn.phi_v_sign);
  }
  if (j.contains("oregonator")) {
    const json& jo = j["oregonator"];
    model.oregonator.f = jo.value("f", model.oregonator.f);
    model.oregonator.q = jo.value("q", model.oregonator.q);
    model.oregonator.sigma = jo.value("sigma", model.oregonator.sigma);
  }
  if (j.contains("diffusion")) {
    const auto d = parse_vec2(j["diffusion"], "model.diffusion");
    model.diff_u = d.x;
    model.diff_v = d.y;
  }
  if (j.contains("bells")) {
    for (const auto& jb : j["bells"]) {
      rd::GaussianBell bell;
      bell.amplitude = jb.value("amplitude", 0.0);
      if (!jb.contains("center")) throw ConfigError("model.bells: missing center");
      bell.center = parse_vec2(jb["center"], "model.bells.center");
      if (jb.contains("rate")) {
        bell.rate = jb["rate"].get<double>();
      } else if (jb.contains("width")) {
        const double w = jb["width"].get<double>();
        if (w <= 0.0) throw ConfigError("model.bells: width must be positive");
        bell.rate = -1.0 / (w * w);
      } else {
        throw ConfigError("model.bells: need 'rate' or 'width'");
      }
      const std::string target = jb.value("target", "u");
      if (target == "u") {
        bell.target = rd::Species::u;
      } else if (target == "v") {
        bell.target = rd::Species::v;
      } else {
        throw ConfigError("model.bells.target: expected 'u' or 'v'");
      }
      model.bells.push_back(bell);
    }
  }
  model.validate();
  return model;
}

json rd_model_to_json(const rd::ModelSpec& model) {
  json j = json::object();
  j["kinetics"] = model.kinetics == rd::Kinetics::fhn ? "fhn" : "oregonator";
  j["fhn"] = {{"sigma", model.fhn.sigma},
              {"beta", model.fhn.beta},
              {"gamma", model.fhn.gamma},
              {"phi_v_sign", model.fhn.phi_v_sign}};
  j["oregonator"] = {{"f", model.oregonator.f},
                     {"q", model.oregonator.q},
                     {"sigma", model.oregonator.sigma}};
  j["diffusion"] = json::array({model.diff_u, model.diff_v});
  j["bells"] = json::array();
  for (const auto& bell : model.bells) {
    j["bells"].push_back({{"amplitude", bell.amplitude},
                          {"center", vec2_to_json(bell.center)},
                          {"rate", bell.rate},
                          {"target", bell.target == rd::Species::u ? "u" : "v"}});
  }
  return json{{"model", j}};
}

rd::GridConfig parse_grid(const json& root) {
  rd::GridConfig grid;
  if (root.contains("grid")) {
    const json& j = root["grid"];
    grid.n = j.value("n", grid.n);
    grid.half_width = j.value("half_width", grid.half_width);
    grid.dt = j.value("dt", grid.dt);
  }
  if (grid.n < 8) throw ConfigError("grid.n: too small");
  if (grid.half_width <= 0.0 || grid.dt <= 0.0) {
    throw ConfigError("grid: half_width and dt must be positive");
  }
  return grid;
}

json grid_to_json(const rd::GridConfig& grid) {
  return json{{"grid", {{"n", grid.n}, {"half_width", grid.half_width}, {"dt", grid.dt}}}};
}

rd::Scheme parse_scheme(const std::string& name) {
  if (name == "rk2") return rd::Scheme::rk2;
  if (name == "rk4") return rd::Scheme::rk4;
  throw ConfigError("scheme: expected 'rk2' or 'rk4', got '" + name + "'");
}

std::string scheme_name(rd::Scheme scheme) {
  return scheme == rd::Scheme::rk2 ? "rk2" : "rk4";
}

}  // namespace spiral::config
