#pragma once

#include "core.hpp"
#include "numerics.hpp"
#include "disc_function.hpp"
#include "ball_geometry.hpp"
#include "holmap.hpp"
#include "carath.hpp"
#include "loewner_flow.hpp"
#include "extremal_lab.hpp"
#include "serialization.hpp"
#include "experiments.hpp"
