#pragma once

namespace ens2::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;  // usage, configuration or invalid parameter
inline constexpr int kExitIo = 3;
inline constexpr int kExitData = 4;
inline constexpr int kExitCompute = 5;

int run(int argc, char** argv);

}  // namespace ens2::cli
