#include "hmt/agent/phase.hpp"

#include "hmt/common/error.hpp"

namespace hmt::agent {

PhaseThresholds::PhaseThresholds(const std::vector<double>& values) {
    if (values.size() != 4) throw Error(Errc::invalid_policy, "four phase thresholds required");
    for (size_t i = 0; i < 4; ++i) {
        if (!(values[i] > 0.0 && values[i] < 1.0)) throw Error(Errc::invalid_policy, "thresholds must lie in (0,1)");
        if (i > 0 && !(values[i] > values[i - 1])) throw Error(Errc::invalid_policy, "thresholds must ascend strictly");
        values_[i] = values[i];
    }
}

int current_phase(double completion, const PhaseThresholds& thresholds) {
    int phase = 1;
    for (double t : thresholds.values())
        if (completion >= t) ++phase;
    return phase;
}

}  // namespace hmt::agent
