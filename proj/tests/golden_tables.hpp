#pragma once

#include <string>
#include <vector>

namespace testing {

/// One reference row: per-subset values and the expected Average cell.
struct GoldenRow {
    std::string method;
    std::vector<double> values;
    double printed_average;
};

inline const std::vector<std::string> kSubsets = {"I1-Inst", "I1-Tool", "I1-Cat",
                                                  "I2-Inst", "I2-Cat",  "I3-Inst"};

inline const std::vector<GoldenRow> kPassTable = {
    {"react-cot", {36.0, 52.0, 40.0, 42.5, 39.0, 37.0}, 41.1},
    {"dfsdt", {57.0, 63.0, 63.0, 78.0, 69.0, 72.0}, 67.0},
    {"sum2act", {71.0, 71.0, 65.0, 78.0, 61.0, 74.0}, 70.0},
};

inline const std::vector<GoldenRow> kWinTable = {
    {"dfsdt vs react-cot", {63.5, 54.5, 65.0, 70.0, 69.0, 72.5}, 65.8},
    {"sum2act vs react-cot", {71.5, 59.5, 66.5, 73.5, 61.5, 74.5}, 67.8},
    {"sum2act vs dfsdt", {60.0, 58.5, 56.0, 55.0, 48.0, 50.0}, 54.6},
};

/// Ablation rows carry both a pass and a win value per subset.
struct GoldenAblationRow {
    std::string method;
    std::vector<double> pass;
    std::vector<double> win;
    double printed_pass_average;
    double printed_win_average;
};

inline const std::vector<GoldenAblationRow> kAblationTable = {
    {"sum2act", {71.0, 71.0, 65.0, 78.0, 61.0, 74.0}, {71.5, 59.5, 66.5, 73.5, 61.5, 74.5}, 70.0, 67.8},
    {"sum2act+decomp", {62.0, 75.0, 73.0, 73.0, 67.0, 74.0}, {64.0, 61.0, 74.5, 70.5, 68.5, 74.0}, 70.7, 68.8},
};

}  // namespace testing
