#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fns2d/acceptance.hpp"

using namespace fns2d;

int main(int argc, char** argv) {
  CLI::App app{"acceptance gate"};
  std::vector<int> ids;
  bool quick = false;
  int threads = default_threads();
  app.add_option("--criterion", ids, "criterion ids to run (default: all)")
      ->check(CLI::Range(1, accept::criterion_count()));
  app.add_flag("--quick", quick, "reduced sample sizes");
  app.add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  if (ids.empty())
    for (int i = 1; i <= accept::criterion_count(); ++i) ids.push_back(i);

  bool all = true;
  for (int id : ids) {
    accept::Result r = accept::run(id, quick ? accept::Tier::quick : accept::Tier::full, threads);
    for (const auto& d : r.details) std::printf("    %s\n", d.c_str());
    std::printf("%s\n", accept::summary_line(r).c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
