#pragma once

#include <vector>

namespace cpv {

using Vec = std::vector<double>;

}  // namespace cpv
