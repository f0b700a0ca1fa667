#include "focksep/config.hpp"

#include <cmath>
#include <set>

namespace focksep {

namespace {

using nlohmann::json;

struct Validator {
  std::vector<SchemaViolation> violations;

  void fail(const std::string& ptr, const std::string& msg) {
    violations.push_back({ptr, msg});
  }

  bool want_number(const json& j, const std::string& ptr, double& out) {
    if (!j.is_number()) {
      fail(ptr, "expected a number");
      return false;
    }
    out = j.get<double>();
    return true;
  }

  bool want_int(const json& j, const std::string& ptr, long long& out) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) {
      fail(ptr, "expected an integer");
      return false;
    }
    out = j.get<long long>();
    return true;
  }

  bool want_bool(const json& j, const std::string& ptr, bool& out) {
    if (!j.is_boolean()) {
      fail(ptr, "expected a boolean");
      return false;
    }
    out = j.get<bool>();
    return true;
  }

  bool want_string(const json& j, const std::string& ptr, std::string& out) {
    if (!j.is_string()) {
      fail(ptr, "expected a string");
      return false;
    }
    out = j.get<std::string>();
    return true;
  }
};

void validate_weight(Validator& v, const json& w) {
  if (!w.is_object()) {
    v.fail("/weight", "expected an object");
    return;
  }
  std::string kind;
  if (!w.contains("kind")) {
    v.fail("/weight/kind", "required");
    return;
  }
  if (!v.want_string(w.at("kind"), "/weight/kind", kind)) return;
  if (kind == "power") {
    if (!w.contains("alpha")) {
      v.fail("/weight/alpha", "required for power weights");
      return;
    }
    double a;
    if (v.want_number(w.at("alpha"), "/weight/alpha", a)) {
      if (!(a > 0.0) || !std::isfinite(a))
        v.fail("/weight/alpha", "alpha must be a finite positive number");
    }
    for (auto it = w.begin(); it != w.end(); ++it)
      if (it.key() != "kind" && it.key() != "alpha")
        v.fail("/weight/" + it.key(), "unknown key");
    return;
  }
  if (kind == "tabulated") {
    std::vector<double> radii;
    bool radii_ok = false;
    if (!w.contains("radii")) {
      v.fail("/weight/radii", "required for tabulated weights");
    } else if (!w.at("radii").is_array()) {
      v.fail("/weight/radii", "expected an array of numbers");
    } else {
      radii_ok = true;
      for (const auto& x : w.at("radii")) {
        if (!x.is_number()) {
          v.fail("/weight/radii", "entries must be numbers");
          radii_ok = false;
          break;
        }
        radii.push_back(x.get<double>());
      }
    }
    if (radii_ok) {
      if (radii.size() < 2) v.fail("/weight/radii", "need at least two knots");
      for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 0.0) {
          v.fail("/weight/radii", "radii must be >= 0");
          break;
        }
        if (i > 0 && !(radii[i] > radii[i - 1])) {
          v.fail("/weight/radii", "radii must be strictly increasing");
          break;
        }
      }
    }
    if (!w.contains("log_laplacian")) {
      v.fail("/weight/log_laplacian", "required for tabulated weights");
    } else if (!w.at("log_laplacian").is_array()) {
      v.fail("/weight/log_laplacian", "expected an array of numbers");
    } else {
      for (const auto& x : w.at("log_laplacian"))
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
          v.fail("/weight/log_laplacian", "entries must be finite numbers");
          break;
        }
      if (radii_ok && w.at("log_laplacian").size() != radii.size())
        v.fail("/weight/log_laplacian", "length must match radii");
    }
    for (auto it = w.begin(); it != w.end(); ++it)
      if (it.key() != "kind" && it.key() != "radii" && it.key() != "log_laplacian")
        v.fail("/weight/" + it.key(), "unknown key");
    return;
  }
  v.fail("/weight/kind", "must be \"power\" or \"tabulated\"");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw SchemaError({{"", std::string("not well-formed JSON: ") + e.what()}});
  }
  Validator v;
  if (!doc.is_object()) {
    v.fail("", "config must be a JSON object");
    throw SchemaError(std::move(v.violations));
  }
  // bare weight document -> nested form
  if (doc.contains("kind") && !doc.contains("weight")) {
    json normalized;
    normalized["weight"] = doc;
    doc = std::move(normalized);
  }

  RunConfig cfg;
  const std::set<std::string> known = {"weight",   "seed",     "workers",
                                       "out",      "format",   "classify",
                                       "rho",      "sample",   "collide",
                                       "zero_one", "trace_identity"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) v.fail("/" + it.key(), "unknown key");

  if (doc.contains("weight")) {
    validate_weight(v, doc.at("weight"));
    if (v.violations.empty()) {
      cfg.weight_spec = doc.at("weight");
      try {
        (void)cfg.weight();  // construction-time probes (doubling, integrability)
      } catch (const Error& e) {
        v.fail("/weight", e.what());
      }
    }
  }

  if (doc.contains("seed")) {
    long long s;
    if (v.want_int(doc.at("seed"), "/seed", s)) {
      if (s < 0)
        v.fail("/seed", "must be >= 0");
      else
        cfg.seed = static_cast<std::uint64_t>(s);
    }
  }
  if (doc.contains("workers")) {
    long long n;
    if (v.want_int(doc.at("workers"), "/workers", n)) {
      if (n < 0 || n > 4096)
        v.fail("/workers", "must be in [0, 4096]");
      else
        cfg.workers = static_cast<int>(n);
    }
  }
  if (doc.contains("out")) v.want_string(doc.at("out"), "/out", cfg.out_dir);
  if (doc.contains("format")) {
    if (v.want_string(doc.at("format"), "/format", cfg.format)) {
      if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "svg")
        v.fail("/format", "must be one of json, csv, svg");
    }
  }

  if (doc.contains("classify")) {
    const json& c = doc.at("classify");
    if (!c.is_object()) {
      v.fail("/classify", "expected an object");
    } else if (c.contains("n_max")) {
      long long n;
      if (v.want_int(c.at("n_max"), "/classify/n_max", n)) {
        if (n < 10)
          v.fail("/classify/n_max", "must be >= 10");
        else
          cfg.classify.n_max = static_cast<int>(n);
      }
    }
  }

  if (doc.contains("rho")) {
    const json& c = doc.at("rho");
    if (!c.is_object() || !c.contains("x_list") || !c.at("x_list").is_array()) {
      v.fail("/rho/x_list", "expected an array of numbers");
    } else {
      std::vector<double> xs;
      for (const auto& x : c.at("x_list")) {
        double val;
        if (!v.want_number(x, "/rho/x_list", val)) break;
        if (val < 0.0) {
          v.fail("/rho/x_list", "entries must be >= 0");
          break;
        }
        xs.push_back(val);
      }
      if (!xs.empty()) cfg.rho.x_list = std::move(xs);
    }
  }

  if (doc.contains("sample")) {
    const json& c = doc.at("sample");
    if (!c.is_object()) {
      v.fail("/sample", "expected an object");
    } else {
      if (c.contains("kind")) {
        std::string k;
        if (v.want_string(c.at("kind"), "/sample/kind", k)) {
          if (k != "hybrid" && k != "poisson")
            v.fail("/sample/kind", "must be \"hybrid\" or \"poisson\"");
          else
            cfg.sample.kind = k;
        }
      }
      if (c.contains("R")) {
        double R;
        if (v.want_number(c.at("R"), "/sample/R", R)) {
          if (!(R > 0.0))
            v.fail("/sample/R", "must be > 0");
          else
            cfg.sample.R = R;
        }
      }
      if (c.contains("eps")) {
        double e;
        if (v.want_number(c.at("eps"), "/sample/eps", e)) {
          if (!(e > 0.0 && e < 1.0))
            v.fail("/sample/eps", "must be in (0,1)");
          else
            cfg.sample.eps = e;
        }
      }
      if (c.contains("intensity_scale")) {
        double s;
        if (v.want_number(c.at("intensity_scale"), "/sample/intensity_scale", s)) {
          if (!(s >= 0.0))
            v.fail("/sample/intensity_scale", "must be >= 0");
          else
            cfg.sample.intensity_scale = s;
        }
      }
    }
  }

  if (doc.contains("collide")) {
    const json& c = doc.at("collide");
    if (!c.is_object()) {
      v.fail("/collide", "expected an object");
    } else {
      if (c.contains("R")) {
        double R;
        if (v.want_number(c.at("R"), "/collide/R", R)) {
          if (!(R > 0.0))
            v.fail("/collide/R", "must be > 0");
          else
            cfg.collide.R = R;
        }
      }
      if (c.contains("trials")) {
        long long t;
        if (v.want_int(c.at("trials"), "/collide/trials", t)) {
          if (t < 1)
            v.fail("/collide/trials", "must be >= 1");
          else
            cfg.collide.trials = static_cast<int>(t);
        }
      }
      if (c.contains("scales")) {
        if (!c.at("scales").is_array()) {
          v.fail("/collide/scales", "expected an array of integers");
        } else {
          std::vector<int> ls;
          for (const auto& x : c.at("scales")) {
            long long l;
            if (!v.want_int(x, "/collide/scales", l)) break;
            if (l < 1) {
              v.fail("/collide/scales", "entries must be >= 1");
              break;
            }
            ls.push_back(static_cast<int>(l));
          }
          if (!ls.empty()) cfg.collide.scales = std::move(ls);
        }
      }
      if (c.contains("shifted")) v.want_bool(c.at("shifted"), "/collide/shifted", cfg.collide.shifted);
    }
  }

  if (doc.contains("zero_one")) {
    const json& c = doc.at("zero_one");
    if (!c.is_object()) {
      v.fail("/zero_one", "expected an object");
    } else {
      if (c.contains("R_list")) {
        if (!c.at("R_list").is_array()) {
          v.fail("/zero_one/R_list", "expected an array of numbers");
        } else {
          std::vector<double> rs;
          bool ok = true;
          for (const auto& x : c.at("R_list")) {
            double R;
            if (!v.want_number(x, "/zero_one/R_list", R)) {
              ok = false;
              break;
            }
            if (!(R > 0.0) || (!rs.empty() && !(R > rs.back()))) {
              v.fail("/zero_one/R_list", "must be positive and strictly increasing");
              ok = false;
              break;
            }
            rs.push_back(R);
          }
          if (ok && rs.size() < 2) v.fail("/zero_one/R_list", "need at least two radii");
          if (ok && rs.size() >= 2) cfg.zero_one.R_list = std::move(rs);
        }
      }
      if (c.contains("trials")) {
        long long t;
        if (v.want_int(c.at("trials"), "/zero_one/trials", t)) {
          if (t < 1)
            v.fail("/zero_one/trials", "must be >= 1");
          else
            cfg.zero_one.trials = static_cast<int>(t);
        }
      }
      if (c.contains("shrink_factor")) {
        double s;
        if (v.want_number(c.at("shrink_factor"), "/zero_one/shrink_factor", s)) {
          if (!(s > 0.0 && s < 1.0))
            v.fail("/zero_one/shrink_factor", "must be in (0,1)");
          else
            cfg.zero_one.shrink_factor = s;
        }
      }
      if (c.contains("stable_band")) {
        double s;
        if (v.want_number(c.at("stable_band"), "/zero_one/stable_band", s)) {
          if (!(s >= 1.0))
            v.fail("/zero_one/stable_band", "must be >= 1");
          else
            cfg.zero_one.stable_band = s;
        }
      }
    }
  }

  if (doc.contains("trace_identity")) {
    const json& c = doc.at("trace_identity");
    if (!c.is_object() || !c.contains("n_list") || !c.at("n_list").is_array()) {
      v.fail("/trace_identity/n_list", "expected an array of integers");
    } else {
      std::vector<int> ns;
      for (const auto& x : c.at("n_list")) {
        long long n;
        if (!v.want_int(x, "/trace_identity/n_list", n)) break;
        if (n < 1) {
          v.fail("/trace_identity/n_list", "entries must be >= 1");
          break;
        }
        ns.push_back(static_cast<int>(n));
      }
      if (!ns.empty()) cfg.trace_identity.n_list = std::move(ns);
    }
  }

  if (!v.violations.empty()) throw SchemaError(std::move(v.violations));
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["weight"] = weight_spec;
  j["seed"] = seed;
  j["workers"] = workers;
  j["out"] = out_dir;
  j["format"] = format;
  j["classify"] = {{"n_max", classify.n_max}};
  j["rho"] = {{"x_list", rho.x_list}};
  j["sample"] = {{"kind", sample.kind},
                 {"R", sample.R},
                 {"eps", sample.eps},
                 {"intensity_scale", sample.intensity_scale}};
  j["collide"] = {{"R", collide.R},
                  {"trials", collide.trials},
                  {"scales", collide.scales},
                  {"shifted", collide.shifted}};
  j["zero_one"] = {{"R_list", zero_one.R_list},
                   {"trials", zero_one.trials},
                   {"shrink_factor", zero_one.shrink_factor},
                   {"stable_band", zero_one.stable_band}};
  j["trace_identity"] = {{"n_list", trace_identity.n_list}};
  return j;
}

}  // namespace focksep
