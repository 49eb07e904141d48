#pragma once

// Everything except the JSON/CSV layer in k2d/io.hpp, which needs nlohmann/json.

#include "k2d/combinatorics.hpp"
#include "k2d/error.hpp"
#include "k2d/hyper.hpp"
#include "k2d/kernel.hpp"
#include "k2d/ortho.hpp"
#include "k2d/panel.hpp"
#include "k2d/params.hpp"
#include "k2d/polynomial_table.hpp"
#include "k2d/quadrature.hpp"
#include "k2d/recurrence.hpp"
#include "k2d/scalar.hpp"
