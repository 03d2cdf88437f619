// Acceptance battery: one line per criterion. Exits nonzero when a criterion
// fails that is not marked unattainable.
#include "imcf/lab/battery.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  using namespace imcf::lab;
  Suite suite = Suite::fast;
  if (argc > 1) suite = suite_from_string(argv[1]);
  const auto results = run_battery(suite);
  write_battery_table(std::cout, results);
  const bool ok = battery_ok(results);
  std::cout << (ok ? "acceptance: ok" : "acceptance: FAILED") << '\n';
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
