#include <catch2/catch_amalgamated.hpp>
#include "giscat/giscat.hpp"
TEST_CASE("wip") { REQUIRE(true); }
