#pragma once

#include "blendifs/error.hpp"
#include "blendifs/ifs.hpp"
#include "blendifs/grid.hpp"
#include "blendifs/blend.hpp"
#include "blendifs/hausdorff.hpp"
#include "blendifs/metrics.hpp"
