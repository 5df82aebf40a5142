#include <iostream>

#include "loceff/suite.hpp"

int main(int argc, char** argv) {
  loceff::SuiteConfig cfg;
  cfg.corpus_dir = argc > 1 ? argv[1] : LOCEFF_CORPUS_DIR;
  auto results = loceff::run_acceptance(cfg, &std::cout);
  bool ok = !results.empty();
  for (const auto& r : results) ok = ok && r.pass;
  return ok ? 0 : 1;
}
