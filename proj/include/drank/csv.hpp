#pragma once

#include <string>

namespace drank {

// 9-significant-digit rendering shared by every CSV artifact.
std::string fmt9(double v);

}  // namespace drank
