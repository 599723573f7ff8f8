#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

int main(int argc, char** argv) {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
    return doctest::Context(argc, argv).run();
}
