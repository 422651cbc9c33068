#pragma once

#include "topgn/config.hpp"
#include "topgn/distance_transform.hpp"
#include "topgn/extrapolation.hpp"
#include "topgn/frame_io.hpp"
#include "topgn/geometry.hpp"
#include "topgn/grid.hpp"
#include "topgn/intensity_map.hpp"
#include "topgn/metrics.hpp"
#include "topgn/nav_map.hpp"
#include "topgn/pgm.hpp"
#include "topgn/planner.hpp"
#include "topgn/scenario.hpp"
#include "topgn/scene_io.hpp"
#include "topgn/simulator.hpp"
#include "topgn/ton.hpp"
#include "topgn/version.hpp"
