// ste.hpp: umbrella header

#pragma once

#include "ste/bath.hpp"
#include "ste/density.hpp"
#include "ste/errors.hpp"
#include "ste/experiments.hpp"
#include "ste/free_propagation.hpp"
#include "ste/matrix2.hpp"
#include "ste/name_dynamics.hpp"
#include "ste/protocol.hpp"
#include "ste/su2.hpp"
#include "ste/synthesis.hpp"
#include "ste/thermo.hpp"
