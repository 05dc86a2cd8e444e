#pragma once

#include "gmev/behavior.hpp"
#include "gmev/error.hpp"
#include "gmev/estimation.hpp"
#include "gmev/example_study.hpp"
#include "gmev/generating.hpp"
#include "gmev/io.hpp"
#include "gmev/linalg.hpp"
#include "gmev/mnp.hpp"
#include "gmev/model.hpp"
#include "gmev/moments.hpp"
#include "gmev/network.hpp"
#include "gmev/optimize.hpp"
#include "gmev/parallel.hpp"
#include "gmev/refroute.hpp"
#include "gmev/sue.hpp"
#include "gmev/vectors.hpp"
#include "gmev/version.hpp"
