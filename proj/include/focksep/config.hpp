#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "focksep/weight.hpp"

namespace focksep {

// Validated run configuration shared by every CLI subcommand. A bare weight
// object {"kind": ...} is accepted and normalized to {"weight": {...}} before
// validation, so violation pointers are always rooted at /weight.
struct RunConfig {
  nlohmann::json weight_spec = {{"kind", "power"}, {"alpha", 2.0}};
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware
  std::string out_dir = "out";
  std::string format = "json";

  struct Classify {
    int n_max = 200;
  } classify;

  struct Rho {
    std::vector<double> x_list{0.0, 1.0, 10.0, 100.0};
  } rho;

  struct Sample {
    std::string kind = "hybrid";  // or "poisson"
    double R = 10.0;
    double eps = 1e-9;
    double intensity_scale = 1.0;
  } sample;

  struct Collide {
    double R = 12.0;
    int trials = 400;
    std::vector<int> scales{1};
    bool shifted = false;
  } collide;

  struct ZeroOne {
    std::vector<double> R_list{20.0, 40.0, 80.0};
    int trials = 100;
    double shrink_factor = 0.5;
    double stable_band = 1.5;
  } zero_one;

  struct TraceIdentity {
    std::vector<int> n_list{1, 2};
  } trace_identity;

  RadialWeight weight() const { return RadialWeight::from_json(weight_spec); }
  nlohmann::json to_json() const;  // normalized, defaults materialized
};

// Parses and validates; throws SchemaError carrying every violation found
// (JSON-pointer paths), not just the first.
RunConfig parse_config(const std::string& json_text);

}  // namespace focksep
