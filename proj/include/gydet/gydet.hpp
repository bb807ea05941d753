#pragma once

#include "gydet/asymptotics.hpp"
#include "gydet/continuum.hpp"
#include "gydet/errors.hpp"
#include "gydet/exact_oracle.hpp"
#include "gydet/gy_discrete.hpp"
#include "gydet/lattice.hpp"
#include "gydet/logdet.hpp"
#include "gydet/special.hpp"
