#include "hemoflow/cli/commands.hpp"
int main() { return 1; }
