#pragma once

#include "rbg/connection.hpp"
#include "rbg/degrees.hpp"
#include "rbg/graph.hpp"
#include "rbg/io.hpp"
#include "rbg/parallel.hpp"
#include "rbg/percolation.hpp"
#include "rbg/point_process.hpp"
#include "rbg/rng.hpp"
#include "rbg/spatial_grid.hpp"
#include "rbg/stats.hpp"
#include "rbg/theory.hpp"
#include "rbg/union_find.hpp"
