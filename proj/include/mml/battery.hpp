#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mml/core.hpp"

namespace mml {

struct BatteryRow {
    std::size_t trial = 0;
    double lhs = 0, rhs = 0;
    bool pass = true;
    std::string instance;  // short description of the instance
    std::string witness;   // full JSON instance, filled for failures only
};

struct BatteryReport {
    std::string lemma;
    std::vector<BatteryRow> rows;
    std::size_t failures = 0;
    bool pass() const { return failures == 0; }
};

// key_1dim, key_lp, key_F, LO, conc_fct, key_lp_N, key_F_N, lm_lem,
// lprok, box1, box_prok, lr_od, kyfan.
const std::vector<std::string>& battery_names();

// Random tiny instances; passes when lhs <= rhs + tol. Exact values are used
// on the right; the left may be a lower bound when the space is too big.
BatteryReport run_inequality_battery(const std::string& lemma, std::size_t trials, std::uint64_t seed,
                                     double tol = 1e-6);

// Random planar point cloud with n points and positive random weights;
// with `denominator` > 0 weights are multiples of 1/denominator.
FiniteMMSpace random_tiny_space(std::mt19937_64& rng, std::size_t n, std::size_t denominator = 0);

std::string battery_csv(const BatteryReport& r);

}  // namespace mml
