#include <cstdio>
#include <cstdlib>
#include <vector>

#include "criteria.hpp"

// Usage: dzip_acceptance [N...]  (no arguments = all ten criteria)
int main(int argc, char** argv) {
  std::vector<int> todo;
  if (argc < 2) {
    for (int i = 1; i <= 10; ++i) todo.push_back(i);
  } else {
    for (int i = 1; i < argc; ++i) {
      const int n = std::atoi(argv[i]);
      if (n < 1 || n > 10) {
        std::fprintf(stderr, "usage: %s [criterion 1..10]...\n", argv[0]);
        return 2;
      }
      todo.push_back(n);
    }
  }

  int failures = 0;
  for (int n : todo) failures += acceptance::run(n) ? 0 : 1;
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
