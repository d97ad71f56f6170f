#pragma once

namespace imin {

/// Entry point of the `imin` tool. Returns 0 on success, 2 on a usage
/// error and 1 on any other failure.
int cli_main(int argc, char** argv);

}  // namespace imin
