#include "leslab/core.hpp"

#include <atomic>

namespace leslab {
namespace exec {

namespace {
std::atomic<ExecMode> g_default{ExecMode::Parallel};
}

void set_default_mode(ExecMode m) { g_default.store(m, std::memory_order_relaxed); }

ExecMode default_mode() { return g_default.load(std::memory_order_relaxed); }

}  // namespace exec
}  // namespace leslab
