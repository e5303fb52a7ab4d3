#pragma once

#include <string>

namespace lipsyn {

/// `v` rounded to `digits` significant decimal digits (ties to even on the
/// decimal representation). Non-finite values pass through.
double round_significant(double v, int digits = 12);

/// "%.12g"-style text of `v`.
std::string format_significant(double v, int digits = 12);

}  // namespace lipsyn
