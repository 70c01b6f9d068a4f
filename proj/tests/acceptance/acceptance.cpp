// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "eulab/parallel.hpp"
#include "eulab/selfcheck.hpp"

int main(int argc, char** argv) {
  eulab::selfcheck::Options opt;
  opt.threads = eulab::default_threads();
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  eulab::selfcheck::run(opt, [&](const eulab::selfcheck::CriterionResult& r) {
    std::cout << eulab::selfcheck::format(r) << std::endl;
    if (!r.passed) ++failed;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
