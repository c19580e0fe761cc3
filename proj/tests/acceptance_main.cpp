#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "anncap/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  for (const auto& r : anncap::run_acceptance(anncap::default_jobs(), only)) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.title << '\n';
    for (const auto& line : r.info) std::cout << "  INFO " << line << '\n';
    std::cout << std::flush;
    all_pass &= r.pass;
  }
  return all_pass ? 0 : 1;
}
