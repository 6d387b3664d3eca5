// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <cstdio>

#include "orbt/verify.hpp"

int main() {
  auto results = orbt::verification_suite(ORBT_DATA_DIR);
  int failures = 0;
  int index = 0;
  for (const auto& r : results) {
    ++index;
    std::printf("%s  %2d  %-34s %s\n", r.ok ? "PASS" : "FAIL", index, r.name.c_str(),
                r.detail.c_str());
    if (!r.ok) ++failures;
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
