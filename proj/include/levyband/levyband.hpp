#pragma once

#include "levyband/bandwidth.hpp"
#include "levyband/bootstrap.hpp"
#include "levyband/char_fn.hpp"
#include "levyband/estimator.hpp"
#include "levyband/harness.hpp"
#include "levyband/kernel.hpp"
#include "levyband/models.hpp"
#include "levyband/numerics.hpp"
#include "levyband/rng.hpp"
