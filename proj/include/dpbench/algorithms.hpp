#pragma once

#include "dpbench/algo/ahp.hpp"
#include "dpbench/algo/dawa.hpp"
#include "dpbench/algo/dpcube.hpp"
#include "dpbench/algo/efpa.hpp"
#include "dpbench/algo/grid.hpp"
#include "dpbench/algo/hierarchical.hpp"
#include "dpbench/algo/hilbert.hpp"
#include "dpbench/algo/identity.hpp"
#include "dpbench/algo/mwem.hpp"
#include "dpbench/algo/partition.hpp"
#include "dpbench/algo/php.hpp"
#include "dpbench/algo/privelet.hpp"
#include "dpbench/algo/quadtree.hpp"
#include "dpbench/algo/sf.hpp"
#include "dpbench/algo/uniform.hpp"
