#include <cstdio>

int main() {
    std::puts("vof2d: placeholder");
    return 0;
}
