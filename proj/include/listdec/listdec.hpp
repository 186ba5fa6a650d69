#pragma once

#include "listdec/random.hpp"
#include "listdec/binomial.hpp"
#include "listdec/model.hpp"
#include "listdec/analytic.hpp"
#include "listdec/stats.hpp"
#include "listdec/parallel.hpp"
#include "listdec/branching.hpp"
#include "listdec/list_decoder.hpp"
#include "listdec/harness.hpp"
