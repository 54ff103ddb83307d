#pragma once

#include "bmep/approx.hpp"
#include "bmep/exact.hpp"
#include "bmep/instances.hpp"
#include "bmep/io.hpp"
#include "bmep/matrix.hpp"
#include "bmep/numeric.hpp"
#include "bmep/objective.hpp"
#include "bmep/random.hpp"
#include "bmep/spanning_tree.hpp"
#include "bmep/tours.hpp"
#include "bmep/tree.hpp"
#include "bmep/value.hpp"
