#pragma once

#include <array>
#include <vector>

namespace hmt::agent {

// Ascending completion fractions t1 < t2 < t3 < t4, each in (0, 1).
class PhaseThresholds {
public:
    PhaseThresholds() = default;
    // Throws Error(invalid_policy) unless strictly ascending inside (0, 1).
    explicit PhaseThresholds(const std::vector<double>& values);

    const std::array<double, 4>& values() const { return values_; }
    bool operator==(const PhaseThresholds&) const = default;

private:
    std::array<double, 4> values_{0.2, 0.4, 0.6, 0.8};
};

// 1 + number of thresholds t with completion >= t. Phase 1 at zero, 5 at 1.0.
int current_phase(double completion, const PhaseThresholds& thresholds);

}  // namespace hmt::agent
