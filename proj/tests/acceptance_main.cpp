#include <cstdio>

#include "alk/acceptance.hpp"

int main() {
  alk::AcceptanceOptions opt;
  int failed = 0;
  for (int id = 1; id <= alk::kCriteria; ++id) {
    auto r = alk::run_criterion(id, opt);
    std::printf("%s criterion %2d  %-30s checks=%-6ld %.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.checks, r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed ? 1 : 0;
}
