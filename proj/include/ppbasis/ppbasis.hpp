#pragma once

#include "ppbasis/errors.hpp"
#include "ppbasis/linalg.hpp"
#include "ppbasis/algebra.hpp"
#include "ppbasis/wedderburn.hpp"
#include "ppbasis/path_algebra.hpp"
#include "ppbasis/basic_construction.hpp"
#include "ppbasis/pp_systems.hpp"
#include "ppbasis/intermediate.hpp"
#include "ppbasis/regular.hpp"
#include "ppbasis/scenario.hpp"
