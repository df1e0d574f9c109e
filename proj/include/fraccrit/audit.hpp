#pragma once

#include <atomic>
#include <cstdint>
#include <string>

namespace fraccrit::audit {

// Process-wide tallies of exact re-substitution checks performed on solver output.
struct Counters {
    std::uint64_t points = 0;
    std::uint64_t certificates = 0;
    std::uint64_t rays = 0;
    std::uint64_t failures = 0;
};

void record_point(bool ok);
void record_certificate(bool ok);
void record_ray(bool ok);
Counters snapshot();
void reset();

}  // namespace fraccrit::audit
