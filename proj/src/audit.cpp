#include "fraccrit/audit.hpp"

namespace fraccrit::audit {
namespace {
std::atomic<std::uint64_t> g_points{0};
std::atomic<std::uint64_t> g_certificates{0};
std::atomic<std::uint64_t> g_rays{0};
std::atomic<std::uint64_t> g_failures{0};

void bump(std::atomic<std::uint64_t>& counter, bool ok) {
    counter.fetch_add(1, std::memory_order_relaxed);
    if (!ok) g_failures.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace

void record_point(bool ok) { bump(g_points, ok); }
void record_certificate(bool ok) { bump(g_certificates, ok); }
void record_ray(bool ok) { bump(g_rays, ok); }

Counters snapshot() {
    return {g_points.load(), g_certificates.load(), g_rays.load(), g_failures.load()};
}

void reset() {
    g_points = 0;
    g_certificates = 0;
    g_rays = 0;
    g_failures = 0;
}

}  // namespace fraccrit::audit
