#pragma once

#include "nrflow/model.hpp"
#include "nrflow/dynamics.hpp"
#include "nrflow/invariants.hpp"
#include "nrflow/brackets.hpp"
#include "nrflow/maps.hpp"
#include "nrflow/integrate.hpp"
#include "nrflow/sampling.hpp"
