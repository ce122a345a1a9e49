#pragma once

#include <string>

namespace mems {

struct DemoReport {
    bool ok = false;
    std::string text;
    // accelerometer metrics, for regression checks
    double rel_l2 = 0;
    double wall_ratio = 0;
};

/// System -> solid (ESM) -> layout (CIF), closed-triangle check, then a
/// lumped drive-axis AC sweep. Artifacts land in workdir.
DemoReport run_demo_gyro(const std::string& workdir);

/// Layout (CIF) -> solid -> extracted netlist -> FEA assembly -> order-q
/// reduction -> transient (pulse + sine) against the full model.
/// q <= 0 selects the full state dimension (exact-reduction regression).
DemoReport run_demo_accel(const std::string& workdir, int q = 10);

}  // namespace mems
