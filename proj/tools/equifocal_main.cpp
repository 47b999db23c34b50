#include <cstdio>
int main(){ std::puts("equifocal cli placeholder"); return 0; }
