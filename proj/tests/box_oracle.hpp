#pragma once

#include "alk/oracles.hpp"

namespace alk::testing {
using alk::oracle::naive_box_count;
using alk::oracle::within;
}  // namespace alk::testing
