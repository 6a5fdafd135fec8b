#pragma once

#include "error.hpp"
#include "integer.hpp"
#include "gaussint.hpp"
#include "quartic.hpp"
#include "residue.hpp"
#include "gauss_sums.hpp"
#include "hecke.hpp"
#include "special.hpp"
#include "analytic.hpp"
#include "lvalues.hpp"
#include "cache.hpp"
#include "moments.hpp"
#include "metaplectic.hpp"
