#pragma once

#include <functional>

namespace mtp {

// Static block partition over [0, count) across hardware threads. Each index
// runs exactly once and writes only its own slot, so results are independent
// of the thread count; reductions happen afterwards in index order.
void parallel_for(int count, const std::function<void(int)>& body);

} // namespace mtp
