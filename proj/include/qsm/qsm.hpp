#pragma once

#include "qsm/composition.hpp"
#include "qsm/constants.hpp"
#include "qsm/error.hpp"
#include "qsm/logpower.hpp"
#include "qsm/oracle.hpp"
#include "qsm/pl_profile.hpp"
#include "qsm/quadrature.hpp"
#include "qsm/roots.hpp"
#include "qsm/tables.hpp"
#include "qsm/tensor.hpp"
