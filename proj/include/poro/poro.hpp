#ifndef PORO_PORO_HPP
#define PORO_PORO_HPP

#include "bench.hpp"
#include "coupling.hpp"
#include "fvm_flow.hpp"
#include "linalg.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "physics.hpp"
#include "rcm.hpp"
#include "scenario.hpp"
#include "sparse.hpp"
#include "strategies.hpp"
#include "threading.hpp"
#include "vem_mech.hpp"

#endif
