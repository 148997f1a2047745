#include "giscat/giscat.hpp"
int main() { return 0; }
