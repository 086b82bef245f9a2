#pragma once

#include "pqk/adapted_basis.hpp"
#include "pqk/chart.hpp"
#include "pqk/common.hpp"
#include "pqk/curvature.hpp"
#include "pqk/epsilon_complex.hpp"
#include "pqk/model_spaces.hpp"
#include "pqk/scenario.hpp"
#include "pqk/shape_space.hpp"
#include "pqk/split_quaternion.hpp"
#include "pqk/submanifold.hpp"
#include "pqk/subspaces.hpp"
#include "pqk/tensors.hpp"
