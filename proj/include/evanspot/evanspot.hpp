#pragma once

#include "evanspot/core/errors.hpp"
#include "evanspot/core/geometry.hpp"
#include "evanspot/core/manifold.hpp"
#include "evanspot/core/phi.hpp"
#include "evanspot/core/potential.hpp"
#include "evanspot/core/quadrature.hpp"
#include "evanspot/criteria/classify.hpp"
#include "evanspot/criteria/divergence.hpp"
#include "evanspot/criteria/keller_osserman.hpp"
#include "evanspot/io/config.hpp"
#include "evanspot/io/csv.hpp"
#include "evanspot/io/registry.hpp"
#include "evanspot/obstacle/discrete.hpp"
#include "evanspot/obstacle/khasminskii.hpp"
#include "evanspot/radial/cauchy.hpp"
#include "evanspot/radial/evans.hpp"
#include "evanspot/cli/commands.hpp"
