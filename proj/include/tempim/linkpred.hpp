#pragma once

#include "tempim/linkpred/binarize.hpp"
#include "tempim/linkpred/jaccard.hpp"
#include "tempim/linkpred/lasso.hpp"
#include "tempim/linkpred/nmf.hpp"
