#pragma once

#include "bifurcation.hpp"
#include "charges.hpp"
#include "coords.hpp"
#include "diagnostics.hpp"
#include "diagram.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "export.hpp"
#include "separation.hpp"
#include "verify.hpp"
