#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace focksep {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240801;
};

// The numbered identity/bound/surrogate checks (everything that does not need
// to re-invoke the CLI binary). Each runs at its pinned tolerance.
std::vector<CheckResult> run_verification_suite(const VerifyOptions& opt = {});

// Byte-identical outputs across reruns and worker counts {1,4}; shells out to
// the CLI binary at `cli_path`, writing under `scratch_dir`.
CheckResult check_determinism(const std::string& cli_path, const std::string& scratch_dir);

}  // namespace focksep
