#pragma once

// Umbrella header for the coupled game/resource dynamics laboratory.

#include "commons_lab/model.hpp"
#include "commons_lab/dynamics.hpp"
#include "commons_lab/equilibria.hpp"
#include "commons_lab/cycles.hpp"
#include "commons_lab/basins.hpp"
#include "commons_lab/abm.hpp"
#include "commons_lab/presets.hpp"
#include "commons_lab/io.hpp"
#include "commons_lab/parallel.hpp"
