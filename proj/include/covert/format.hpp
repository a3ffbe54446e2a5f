#pragma once

#include <string>

namespace covert {

/// Shortest general-format rendering with 10 significant digits, "." as the
/// decimal point regardless of locale; NaN prints as "nan", infinities as
/// "inf" / "-inf".
std::string format_double(double value);

}  // namespace covert
