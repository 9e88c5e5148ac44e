#pragma once

#include "shadowlab/binary_angle.hpp"
#include "shadowlab/catalog.hpp"
#include "shadowlab/density.hpp"
#include "shadowlab/dynprops.hpp"
#include "shadowlab/experiments.hpp"
#include "shadowlab/io.hpp"
#include "shadowlab/pseudo_orbit.hpp"
#include "shadowlab/svg.hpp"
#include "shadowlab/symbol_point.hpp"
#include "shadowlab/system.hpp"
#include "shadowlab/verify.hpp"
