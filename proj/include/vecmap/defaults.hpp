#pragma once

#include <array>

// Published constants. Every configurable default in the library is read from
// here so the values cannot drift apart.
namespace vecmap::defaults {

inline constexpr std::array<double, 3> kCdThresholds = {0.5, 1.0, 1.5};
inline constexpr double kRangeX = 60.0;
inline constexpr double kRangeY = 30.0;

inline constexpr double kGridResolution = 0.15;
inline constexpr int kGridWidth = 400;
inline constexpr int kGridHeight = 200;
inline constexpr double kRasterThreshold = 0.4;

inline constexpr double kLambdaCls = 2.0;
inline constexpr double kLambdaPts = 5.0;
inline constexpr double kLambdaDirs = 0.005;
inline constexpr double kLambdaCst = 0.1;
inline constexpr double kLambdaOl = 1.0;
inline constexpr double kLambdaVar = 1.0;
inline constexpr double kLambdaDist = 0.1;

inline constexpr int kMaxAnchorsPerLabel = 3;

// Library choices where no published value exists.
inline constexpr int kEvalResampleN = 100;
inline constexpr int kNegativesPerLabel = 3;
inline constexpr double kPositiveRadius = 5.0;
inline constexpr double kScoreTau = 1.0;
inline constexpr double kFocalAlpha = 0.25;
inline constexpr double kFocalGamma = 2.0;
inline constexpr double kDeltaVar = 0.5;
inline constexpr double kDeltaDist = 3.0;
inline constexpr double kMatchClsWeight = 2.0;
inline constexpr double kMatchPtsWeight = 5.0;
inline constexpr int kTemporalWindow = 2;
inline constexpr int kMatchPoints = 20;

}  // namespace vecmap::defaults
