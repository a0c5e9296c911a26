#pragma once

namespace conedisp {
int run_cli(int argc, char** argv);
}
