#pragma once

#include "errors.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "measure.hpp"
#include "measure_io.hpp"
#include "sampling.hpp"
#include "w1_1d.hpp"
#include "network_simplex.hpp"
#include "transport.hpp"
#include "max_sliced.hpp"
#include "law_distance.hpp"
#include "bounds.hpp"
#include "experiments.hpp"
