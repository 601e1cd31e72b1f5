// Acceptance suite: runs every named verification check at its documented
// tolerance and prints one pass/fail line per criterion.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "orbitsym/verify.hpp"

int main(int argc, char** argv) {
  unsigned seed = 12345;
  if (argc > 1) seed = static_cast<unsigned>(std::strtoul(argv[1], nullptr, 10));
  const char* env_threads = std::getenv("ORBITSYM_THREADS");
  const int threads = env_threads ? std::atoi(env_threads) : 2;

  const auto names = orbitsym::verification_check_names();
  int failures = 0;
  int index = 0;
  for (const auto& name : names) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    orbitsym::CheckResult result;
    try {
      result = orbitsym::run_verification_check(name, seed, threads);
    } catch (const std::exception& e) {
      result.name = name;
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%2d/%2zu] %s  %-26s  value=%-12.5g  (%.2fs)  %s\n", index, names.size(),
                result.pass ? "PASS" : "FAIL", result.name.c_str(), result.value, elapsed,
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  if (failures > 0) std::printf("%d of %zu acceptance checks failed\n", failures, names.size());
  else std::printf("all %zu acceptance checks passed\n", names.size());
  return failures == 0 ? 0 : 1;
}
