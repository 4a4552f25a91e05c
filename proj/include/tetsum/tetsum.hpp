#pragma once

#include "tetsum/error.hpp"
#include "tetsum/geom_core.hpp"
#include "tetsum/tet_metrics.hpp"
#include "tetsum/fourball.hpp"
#include "tetsum/partition.hpp"
#include "tetsum/bounds.hpp"
#include "tetsum/io.hpp"
