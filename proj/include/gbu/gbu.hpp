#pragma once

#include "gbu/barriers.hpp"
#include "gbu/config.hpp"
#include "gbu/diagnostics.hpp"
#include "gbu/error.hpp"
#include "gbu/evolution.hpp"
#include "gbu/grid.hpp"
#include "gbu/initial_data.hpp"
#include "gbu/io.hpp"
#include "gbu/j_functional.hpp"
#include "gbu/operators.hpp"
#include "gbu/params.hpp"
#include "gbu/selftest.hpp"
