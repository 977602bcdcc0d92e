// Acceptance suite: one pass/fail line per criterion. Placeholder until the
// experiment presets are calibrated.
#include <cstdio>

int main() {
    std::printf("acceptance placeholder\n");
    return 1;
}
