#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gluco {

struct SuiteEntry {
    std::string name;
    double max_rel_err = 0;
    std::size_t coords = 0;
    bool ok = false;
};

struct SuiteResult {
    std::vector<SuiteEntry> entries;

    bool all_ok() const {
        for (const SuiteEntry& e : entries) {
            if (!e.ok) return false;
        }
        return !entries.empty();
    }
};

// Finite-difference checks over every op (three random shapes each) plus
// end-to-end MSE gradients of both models at tiny configs. Runs in seconds.
SuiteResult run_gradcheck_suite(std::uint64_t seed);

}  // namespace gluco
