#pragma once

#include "geomancer/backends.hpp"
#include "geomancer/bench.hpp"
#include "geomancer/cast.hpp"
#include "geomancer/catalog.hpp"
#include "geomancer/dataset.hpp"
#include "geomancer/filter.hpp"
#include "geomancer/geo.hpp"
#include "geomancer/matrix_io.hpp"
#include "geomancer/spatial_index.hpp"
#include "geomancer/spell.hpp"
#include "geomancer/spellbook.hpp"
