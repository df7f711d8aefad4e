#pragma once

#include "core.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "reconstruction.hpp"
#include "residual.hpp"
#include "jacobian.hpp"
#include "multigrid.hpp"
#include "newton.hpp"
#include "cases.hpp"
#include "io.hpp"
