#pragma once

// Generated by tools/oracles/freeze.py; do not edit by hand.

#include <array>
#include <vector>

namespace oracle {

struct Quantile { double u; double z; };
inline constexpr std::array<Quantile, 5> kInverseNormal{{
    {0.975, 1.9599639845400542355},
    {0.3, -0.52440051270804078404},
    {0.001, -3.0902323061678135415},
    {1e-10, -6.3613409024040562047},
    {0.999999, 4.7534243088228989482},
}};

// Unscrambled 2D Sobol' (origin included), n = 8 ... 256.
inline constexpr std::array<double, 6> kSobolStar{
    0.3125,
    0.171875,
    0.08984375,
    0.0537109375,
    0.025146484375,
    0.01458740234375,
};

struct StarCase { int d; std::vector<double> coords; double value; };
inline const std::vector<StarCase> kStarCases{
    {1, {0.189641, 0.999871, 0.586661, 0.835101, 0.265712, 0.112481, 0.786025}, 0.21459642857142858},
    {2, {0.519942, 0.936264, 0.644487, 0.195720, 0.508317, 0.677338, 0.782209, 0.286342, 0.791557, 0.421444}, 0.50831700000000002},
    {2, {0.846991, 0.594416, 0.156874, 0.933799, 0.646330, 0.128105, 0.922191, 0.897957, 0.345653, 0.885484, 0.278395, 0.693479, 0.054588, 0.321867, 0.295041, 0.923150, 0.147346, 0.220883, 0.467331, 0.990635, 0.546345, 0.059071, 0.501687, 0.491724, 0.072014, 0.432652}, 0.27009938461538463},
    {3, {0.531162, 0.364217, 0.315516, 0.777601, 0.635885, 0.691090, 0.875828, 0.673841, 0.484401, 0.374206, 0.307589, 0.034324, 0.045902, 0.699225, 0.662841, 0.330158, 0.468744, 0.948079}, 0.41939563036576921},
    {3, {0.942030, 0.161030, 0.756373, 0.092127, 0.780394, 0.501215, 0.380679, 0.726234, 0.555656, 0.797641, 0.828136, 0.291113, 0.716106, 0.218089, 0.502453, 0.322631, 0.439180, 0.775330, 0.426286, 0.982698, 0.184581, 0.351106, 0.101301, 0.014876, 0.544955, 0.527821, 0.439732, 0.298292, 0.024256, 0.124106, 0.561852, 0.225658, 0.245107}, 0.38263629944351402},
};

inline constexpr double kAsianMidPayoff = 4.8851833639257602047;
inline constexpr double kAsianZeroVol = 6.0669273216386395249;
inline constexpr double kTruncationIntegral100 = -0.33333333333333333333;

}  // namespace oracle
