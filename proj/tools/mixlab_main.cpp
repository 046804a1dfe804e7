#include <cstdio>
int main() { std::puts("mixlab placeholder"); return 0; }
