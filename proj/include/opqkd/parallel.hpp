#pragma once

namespace opqkd {

enum class Execution { serial, parallel };

/// Worker count for subsequent parallel regions; <= 0 keeps the default.
void set_thread_count(int threads);
int thread_count();

}  // namespace opqkd
