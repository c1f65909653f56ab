#pragma once

// Whole library. The benchmark harness lives under ifed/bench/ and is not included here.

#include "ifed/core/errors.hpp"
#include "ifed/core/vec2.hpp"
#include "ifed/coupling/coupling.hpp"
#include "ifed/coupling/kernels.hpp"
#include "ifed/fluid/mac_grid.hpp"
#include "ifed/fluid/navier_stokes.hpp"
#include "ifed/fluid/poisson.hpp"
#include "ifed/fluid/snapshot.hpp"
#include "ifed/fsi/timestepper.hpp"
#include "ifed/mechanics/fe_field.hpp"
#include "ifed/mechanics/loads.hpp"
#include "ifed/mechanics/mass.hpp"
#include "ifed/mechanics/material.hpp"
#include "ifed/mechanics/sparse.hpp"
#include "ifed/mesh/mesh_generators.hpp"
#include "ifed/mesh/mesh_io.hpp"
#include "ifed/mesh/reference_element.hpp"
#include "ifed/mesh/structural_mesh.hpp"
#include "ifed/quadrature/mesh_quadrature.hpp"
#include "ifed/quadrature/reference_rules.hpp"
