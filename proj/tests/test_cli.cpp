#include <catch2/catch_amalgamated.hpp>

#include "hemoflow/cli/commands.hpp"

TEST_CASE("placeholder_cli") { CHECK(true); }
