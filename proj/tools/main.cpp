#include <cstdio>

int main() {
  std::fprintf(stderr, "conesmith: command line not wired up yet\n");
  return 2;
}
