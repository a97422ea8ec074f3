#pragma once

#include "afem/types.hpp"
#include "afem/quadrature.hpp"
#include "afem/mesh.hpp"
#include "afem/refine.hpp"
#include "afem/mesh_io.hpp"
#include "afem/basis.hpp"
#include "afem/coefficient.hpp"
#include "afem/problems.hpp"
#include "afem/solvers.hpp"
#include "afem/recovery.hpp"
#include "afem/estimators.hpp"
#include "afem/driver.hpp"
#include "afem/output.hpp"
