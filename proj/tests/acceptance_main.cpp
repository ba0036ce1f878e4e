#include <cstdlib>
#include <iostream>
#include <string>

#include "omegacat/acceptance.hpp"

int main(int argc, char** argv) {
  omega::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc)
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
    else
      opts.only.push_back(a);
  }
  int failed = 0;
  for (auto& r : omega::run_acceptance(opts)) {
    std::cout << omega::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
