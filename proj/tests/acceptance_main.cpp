#include <cstdlib>
#include <iostream>

#include "greenlinker/acceptance.hpp"
#include "greenlinker/parallel.hpp"

int main(int argc, char** argv) {
  greenlinker::AcceptanceOptions opts;
  opts.threads = greenlinker::resolve_threads();
  for (int i = 1; i < argc; ++i) opts.only.push_back(std::atoi(argv[i]));
  bool all = true;
  greenlinker::run_acceptance(opts, [&](const greenlinker::CriterionResult& r) {
    all = all && r.pass;
    std::cout << greenlinker::format_result(r) << std::endl;
  });
  std::cout << (all ? "acceptance: all criteria pass" : "acceptance: FAILURES") << std::endl;
  return all ? 0 : 1;
}
