// Acceptance suite: runs every numbered criterion at its pinned tolerance and
// prints one pass/fail line per criterion. Criterion 10 shells out to the CLI
// binary passed via --cli.

#include <cstdio>
#include <cstring>
#include <string>

#include "focksep/verification.hpp"

int main(int argc, char** argv) {
  std::string cli_path = "./focksep";
  std::string scratch = "acceptance_scratch";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--cli") == 0) cli_path = argv[i + 1];
    if (std::strcmp(argv[i], "--scratch") == 0) scratch = argv[i + 1];
  }

  auto results = focksep::run_verification_suite({});
  results.push_back(focksep::check_determinism(cli_path, scratch));

  int failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::printf("criterion %2zu [%s] %s: %s (%.2f s)\n", i + 1,
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : 1;
}
