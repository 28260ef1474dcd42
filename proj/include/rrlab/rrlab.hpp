#pragma once

#include "rrlab/displacement.hpp"
#include "rrlab/error.hpp"
#include "rrlab/evaluator.hpp"
#include "rrlab/fixtures.hpp"
#include "rrlab/generators.hpp"
#include "rrlab/graph.hpp"
#include "rrlab/lattice.hpp"
#include "rrlab/parallel.hpp"
#include "rrlab/regularity.hpp"
#include "rrlab/selection.hpp"
#include "rrlab/subset_sum.hpp"
