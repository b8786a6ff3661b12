#pragma once

namespace hsps::cli {

/// Exit codes: 0 success, 1 I/O or internal failure, 2 configuration or usage error,
/// 3 numeric or physics error, 4 fit or fit-data failure.
int run(int argc, char** argv);

}  // namespace hsps::cli
