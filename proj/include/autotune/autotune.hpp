#pragma once

#include "autotune/adaboost.hpp"
#include "autotune/dataset.hpp"
#include "autotune/evaluation.hpp"
#include "autotune/genetic.hpp"
#include "autotune/grid_search.hpp"
#include "autotune/hooke_jeeves.hpp"
#include "autotune/learners.hpp"
#include "autotune/matrix.hpp"
#include "autotune/metrics.hpp"
#include "autotune/search_space.hpp"
#include "autotune/spaces.hpp"
#include "autotune/svm.hpp"
#include "autotune/tree.hpp"
#include "autotune/tuner.hpp"
#include "autotune/version.hpp"
