#include <cstdio>
#include "polyglue/verify.hpp"

int main() {
  const auto results = polyglue::run_acceptance(false, "acceptance_out");
  bool all = true;
  for (const auto& r : results) {
    std::puts(polyglue::format_result_line(r).c_str());
    all = all && r.pass;
  }
  std::puts(all ? "ALL CRITERIA PASS" : "CRITERIA FAILED");
  return all ? 0 : 1;
}
