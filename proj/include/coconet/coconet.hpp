#pragma once

#include "coconet/equilibrium.hpp"
#include "coconet/error.hpp"
#include "coconet/forward_map.hpp"
#include "coconet/io.hpp"
#include "coconet/limits.hpp"
#include "coconet/matrix_checks.hpp"
#include "coconet/network.hpp"
#include "coconet/partition.hpp"
#include "coconet/region.hpp"
#include "coconet/rng.hpp"
#include "coconet/superfair.hpp"
