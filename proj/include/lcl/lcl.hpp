#pragma once

#include "lcl/cycles.hpp"
#include "lcl/drk.hpp"
#include "lcl/flow.hpp"
#include "lcl/graph.hpp"
#include "lcl/harness.hpp"
#include "lcl/parallel.hpp"
#include "lcl/pcg.hpp"
#include "lcl/prk.hpp"
#include "lcl/random.hpp"
#include "lcl/solve.hpp"
#include "lcl/tree.hpp"
#include "lcl/work.hpp"
